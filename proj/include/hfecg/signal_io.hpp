#pragma once

#include "hfecg/types.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hfecg {

// Recorded electrode channels.
enum class Channel { L, F, C1, C2, C3, C4, C5, C6 };
inline constexpr std::size_t kChannelCount = 8;
inline constexpr std::array<Channel, kChannelCount> kChannels = {
    Channel::L,  Channel::F,  Channel::C1, Channel::C2,
    Channel::C3, Channel::C4, Channel::C5, Channel::C6};

// The 12 standard leads.
enum class Lead { I, II, III, aVR, aVL, aVF, V1, V2, V3, V4, V5, V6 };
inline constexpr std::size_t kLeadCount = 12;
inline constexpr std::array<Lead, kLeadCount> kLeads = {
    Lead::I,  Lead::II, Lead::III, Lead::aVR, Lead::aVL, Lead::aVF,
    Lead::V1, Lead::V2, Lead::V3,  Lead::V4,  Lead::V5,  Lead::V6};

std::string_view to_string(Channel channel);
std::string_view to_string(Lead lead);
std::optional<Channel> parse_channel(std::string_view name);
std::optional<Lead> parse_lead(std::string_view name);

struct EcgRecord {
  std::array<Eigen::VectorXd, kChannelCount> channels;
  int sampling_rate = 0;
  std::string subject_id;
  GroupLabel group_label = GroupLabel::unlabeled;

  const Eigen::VectorXd &channel(Channel c) const {
    return channels[static_cast<std::size_t>(c)];
  }
  Eigen::VectorXd &channel(Channel c) {
    return channels[static_cast<std::size_t>(c)];
  }
  Eigen::Index length() const { return channels[0].size(); }
};

// Throws FormatError / LengthMismatchError / DomainError when the record
// violates its invariants.
void validate(const EcgRecord &record);

struct LeadSet {
  std::array<Eigen::VectorXd, kLeadCount> leads;
  int sampling_rate = 0;
  std::string subject_id;
  GroupLabel group_label = GroupLabel::unlabeled;

  const Eigen::VectorXd &lead(Lead l) const {
    return leads[static_cast<std::size_t>(l)];
  }
  Eigen::Index length() const { return leads[0].size(); }
};

struct Fragment {
  Eigen::VectorXd samples;
  int sampling_rate = 0;
  Lead lead = Lead::I;
  std::string subject_id;
  int fragment_index = 0;
  Eigen::Index start_sample = 0;
  GroupLabel group_label = GroupLabel::unlabeled;
};

enum class RecordFormat { csv };

/// Reads a record in the CSV format: optional `# key=value` comment lines
/// (`rate` is required, `subject` and `label` optional), a header naming the
/// eight channels in any order, then one row per sample.
EcgRecord load_record(const std::filesystem::path &path,
                      RecordFormat format = RecordFormat::csv);
EcgRecord parse_record_csv(std::string_view text,
                           std::string_view default_subject = {});
std::string format_record_csv(const EcgRecord &record);

// I=L, II=F, III=F-L, aVR=-(L+F)/2, aVL=L-F/2, aVF=F-L/2, Vi=Ci-(L+F)/3.
LeadSet derive_leads(const EcgRecord &record);

/// Cuts `count` consecutive non-overlapping windows of `duration_s` from the
/// start of every lead. Fragments are ordered lead-major.
std::vector<Fragment> extract_fragments(const LeadSet &leads, double duration_s,
                                        int count);

// Samples per fragment; rejects non-integer duration * rate.
Eigen::Index fragment_length(double duration_s, int sampling_rate);

// subject_id,lead,fragment_index,start_sample,length
std::string format_fragment_manifest(const std::vector<Fragment> &fragments);

} // namespace hfecg
