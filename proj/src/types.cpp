#include "hfecg/error.hpp"
#include "hfecg/types.hpp"

namespace hfecg {

const char *to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::io: return "io";
  case ErrorKind::format: return "format";
  case ErrorKind::parse: return "parse";
  case ErrorKind::length_mismatch: return "length_mismatch";
  case ErrorKind::insufficient_data: return "insufficient_data";
  case ErrorKind::domain: return "domain";
  case ErrorKind::data: return "data";
  case ErrorKind::numerical: return "numerical";
  }
  return "unknown";
}

std::string_view to_string(GroupLabel label) {
  switch (label) {
  case GroupLabel::healthy: return "healthy";
  case GroupLabel::sick: return "sick";
  case GroupLabel::unlabeled: return "unlabeled";
  }
  return "unlabeled";
}

std::optional<GroupLabel> parse_group_label(std::string_view text) {
  if (text == "healthy") return GroupLabel::healthy;
  if (text == "sick") return GroupLabel::sick;
  if (text == "unlabeled" || text.empty()) return GroupLabel::unlabeled;
  return std::nullopt;
}

std::optional<int> class_index(GroupLabel label) {
  switch (label) {
  case GroupLabel::healthy: return 0;
  case GroupLabel::sick: return 1;
  default: return std::nullopt;
  }
}

} // namespace hfecg
