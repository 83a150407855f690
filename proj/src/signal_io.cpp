#include "hfecg/signal_io.hpp"

#include "hfecg/error.hpp"
#include "hfecg/text_io.hpp"

#include <cmath>
#include <sstream>

namespace hfecg {

namespace {

constexpr std::array<std::string_view, kChannelCount> kChannelNames = {
    "L", "F", "C1", "C2", "C3", "C4", "C5", "C6"};
constexpr std::array<std::string_view, kLeadCount> kLeadNames = {
    "I", "II", "III", "aVR", "aVL", "aVF", "V1", "V2", "V3", "V4", "V5", "V6"};

} // namespace

std::string_view to_string(Channel channel) {
  return kChannelNames[static_cast<std::size_t>(channel)];
}

std::string_view to_string(Lead lead) { return kLeadNames[static_cast<std::size_t>(lead)]; }

std::optional<Channel> parse_channel(std::string_view name) {
  for (std::size_t i = 0; i < kChannelCount; ++i)
    if (kChannelNames[i] == name)
      return kChannels[i];
  return std::nullopt;
}

std::optional<Lead> parse_lead(std::string_view name) {
  for (std::size_t i = 0; i < kLeadCount; ++i)
    if (kLeadNames[i] == name)
      return kLeads[i];
  return std::nullopt;
}

void validate(const EcgRecord &record) {
  if (record.sampling_rate <= 0)
    throw DomainError("sampling rate must be positive (got " +
                      std::to_string(record.sampling_rate) + ")");
  const Eigen::Index n = record.channels[0].size();
  for (Channel c : kChannels) {
    if (record.channel(c).size() != n)
      throw LengthMismatchError("channel lengths differ: L has " + std::to_string(n) +
                                " samples, " + std::string(to_string(c)) + " has " +
                                std::to_string(record.channel(c).size()));
  }
  if (n < 1)
    throw FormatError("record has no samples");
}

EcgRecord parse_record_csv(std::string_view text, std::string_view default_subject) {
  EcgRecord record;
  record.subject_id = std::string(default_subject);
  std::optional<long long> rate;

  std::vector<std::optional<Channel>> columns;
  std::array<std::vector<double>, kChannelCount> values;
  std::array<bool, kChannelCount> ended{};
  bool have_header = false;
  std::size_t data_row = 0;

  const auto lines = split_lines(text);
  for (std::size_t line_no = 0; line_no < lines.size(); ++line_no) {
    const std::string_view line = trim(lines[line_no]);
    if (line.empty())
      continue;
    if (line.front() == '#') {
      if (const auto kv = parse_comment_pair(line)) {
        const auto [key, value] = *kv;
        if (key == "rate") {
          rate = parse_integer(value);
          if (!rate)
            throw FormatError("line " + std::to_string(line_no + 1) +
                              ": rate must be an integer (got '" + std::string(value) + "')");
        } else if (key == "subject") {
          record.subject_id = std::string(value);
        } else if (key == "label") {
          const auto label = parse_group_label(value);
          if (!label)
            throw FormatError("line " + std::to_string(line_no + 1) + ": unknown label '" +
                              std::string(value) + "'");
          record.group_label = *label;
        }
      }
      continue;
    }
    const auto cells = split(line, ',');
    if (!have_header) {
      std::array<bool, kChannelCount> seen{};
      for (auto cell : cells) {
        const auto name = trim(cell);
        const auto channel = parse_channel(name);
        if (!channel)
          throw FormatError("unexpected column '" + std::string(name) + "'");
        const auto idx = static_cast<std::size_t>(*channel);
        if (seen[idx])
          throw FormatError("duplicate channel " + std::string(name));
        seen[idx] = true;
        columns.push_back(channel);
      }
      for (Channel c : kChannels)
        if (!seen[static_cast<std::size_t>(c)])
          throw FormatError("missing channel " + std::string(to_string(c)));
      have_header = true;
      continue;
    }
    ++data_row;
    if (cells.size() > columns.size())
      throw ParseError("row " + std::to_string(data_row) + " (line " +
                       std::to_string(line_no + 1) + "): " + std::to_string(cells.size()) +
                       " cells for " + std::to_string(columns.size()) + " channels");
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const auto idx = static_cast<std::size_t>(*columns[j]);
      const std::string_view cell = j < cells.size() ? trim(cells[j]) : std::string_view{};
      if (cell.empty()) {
        ended[idx] = true;
        continue;
      }
      if (ended[idx])
        throw ParseError("row " + std::to_string(data_row) + " (line " +
                         std::to_string(line_no + 1) + "): channel " +
                         std::string(to_string(*columns[j])) + " has a gap");
      const auto v = parse_double(cell);
      if (!v)
        throw ParseError("row " + std::to_string(data_row) + " (line " +
                         std::to_string(line_no + 1) + "): non-numeric value '" +
                         std::string(cell) + "' in channel " +
                         std::string(to_string(*columns[j])));
      values[idx].push_back(*v);
    }
  }
  if (!have_header)
    throw FormatError("missing header row");
  if (!rate)
    throw FormatError("missing '# rate=<int>' line");
  if (*rate <= 0 || *rate > std::numeric_limits<int>::max())
    throw FormatError("rate must be a positive integer (got " + std::to_string(*rate) + ")");
  record.sampling_rate = static_cast<int>(*rate);
  for (std::size_t i = 0; i < kChannelCount; ++i)
    record.channels[i] = Eigen::Map<const Eigen::VectorXd>(
        values[i].data(), static_cast<Eigen::Index>(values[i].size()));
  validate(record);
  return record;
}

EcgRecord load_record(const std::filesystem::path &path, RecordFormat format) {
  switch (format) {
  case RecordFormat::csv:
    return parse_record_csv(read_text_file(path), path.stem().string());
  }
  throw FormatError("unsupported record format");
}

std::string format_record_csv(const EcgRecord &record) {
  validate(record);
  std::string out;
  out += "# rate=" + std::to_string(record.sampling_rate) + "\n";
  if (!record.subject_id.empty())
    out += "# subject=" + record.subject_id + "\n";
  if (record.group_label != GroupLabel::unlabeled)
    out += "# label=" + std::string(to_string(record.group_label)) + "\n";
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    if (i)
      out += ',';
    out += kChannelNames[i];
  }
  out += '\n';
  for (Eigen::Index n = 0; n < record.length(); ++n) {
    for (std::size_t i = 0; i < kChannelCount; ++i) {
      if (i)
        out += ',';
      out += format_double(record.channels[i][n]);
    }
    out += '\n';
  }
  return out;
}

LeadSet derive_leads(const EcgRecord &record) {
  validate(record);
  const Eigen::VectorXd &L = record.channel(Channel::L);
  const Eigen::VectorXd &F = record.channel(Channel::F);
  LeadSet set;
  set.sampling_rate = record.sampling_rate;
  set.subject_id = record.subject_id;
  set.group_label = record.group_label;
  auto at = [&](Lead lead) -> Eigen::VectorXd & {
    return set.leads[static_cast<std::size_t>(lead)];
  };
  at(Lead::I) = L;
  at(Lead::II) = F;
  at(Lead::III) = F - L;
  at(Lead::aVR) = -(L + F) / 2;
  at(Lead::aVL) = L - F / 2;
  at(Lead::aVF) = F - L / 2;
  const Eigen::VectorXd limb_mean = (L + F) / 3;
  constexpr std::array<std::pair<Lead, Channel>, 6> chest = {
      std::pair{Lead::V1, Channel::C1}, std::pair{Lead::V2, Channel::C2},
      std::pair{Lead::V3, Channel::C3}, std::pair{Lead::V4, Channel::C4},
      std::pair{Lead::V5, Channel::C5}, std::pair{Lead::V6, Channel::C6}};
  for (const auto &[lead, channel] : chest)
    at(lead) = record.channel(channel) - limb_mean;
  return set;
}

Eigen::Index fragment_length(double duration_s, int sampling_rate) {
  if (!(duration_s > 0) || sampling_rate <= 0)
    throw DomainError("fragment duration and sampling rate must be positive");
  const double samples = duration_s * sampling_rate;
  const double rounded = std::round(samples);
  if (std::abs(samples - rounded) > 1e-9 * std::max(1.0, samples))
    throw DomainError("fragment duration " + format_double(duration_s) + " s at " +
                      std::to_string(sampling_rate) +
                      " Hz is not a whole number of samples");
  return static_cast<Eigen::Index>(rounded);
}

std::vector<Fragment> extract_fragments(const LeadSet &leads, double duration_s, int count) {
  if (count < 0)
    throw DomainError("fragment count must be >= 0 (got " + std::to_string(count) + ")");
  const Eigen::Index length = fragment_length(duration_s, leads.sampling_rate);
  if (count == 0)
    return {};
  const Eigen::Index required = length * count;
  if (required > leads.length())
    throw InsufficientDataError(
        std::to_string(count) + " fragments of " + format_double(duration_s) +
        " s need " + std::to_string(required) + " samples; record has " +
        std::to_string(leads.length()));
  std::vector<Fragment> out;
  out.reserve(kLeadCount * static_cast<std::size_t>(count));
  for (Lead lead : kLeads) {
    for (int f = 0; f < count; ++f) {
      Fragment frag;
      frag.start_sample = f * length;
      frag.samples = leads.lead(lead).segment(frag.start_sample, length);
      frag.sampling_rate = leads.sampling_rate;
      frag.lead = lead;
      frag.subject_id = leads.subject_id;
      frag.fragment_index = f;
      frag.group_label = leads.group_label;
      out.push_back(std::move(frag));
    }
  }
  return out;
}

std::string format_fragment_manifest(const std::vector<Fragment> &fragments) {
  std::string out = "subject_id,lead,fragment_index,start_sample,length\n";
  for (const auto &f : fragments) {
    out += f.subject_id + "," + std::string(to_string(f.lead)) + "," +
           std::to_string(f.fragment_index) + "," + std::to_string(f.start_sample) + "," +
           std::to_string(f.samples.size()) + "\n";
  }
  return out;
}

} // namespace hfecg
