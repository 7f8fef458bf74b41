#pragma once

// Transfer-record ingestion: CSV/JSONL parsing, address labels, entity
// grouping by the first-":" name-tag prefix, and token/time filtering.
//
// Addresses, tokens and tx hashes are lowercased and trimmed at parse time;
// the transfer `value` is carried through untouched and never used as an
// edge weight.

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "mtnet/csv.hpp"
#include "mtnet/error.hpp"
#include "mtnet/strings.hpp"
#include "mtnet/time.hpp"

namespace mtnet {

struct TransferRecord {
  std::uint64_t block_number = 0;
  time::UnixSeconds timestamp = 0;
  std::string tx_hash;
  std::string from_addr;
  std::string to_addr;
  std::string token;
  std::string value;  // arbitrary-precision decimal, kept verbatim

  bool operator==(const TransferRecord&) const = default;
};

enum class TransferFormat { csv, jsonl };

enum class AccountType { eoa, ca, unknown };

struct AddressLabel {
  std::string address;
  std::string name_tag;  // empty = untagged
  AccountType account_type = AccountType::unknown;
};

// Grouping key: substring before the first ':' (trimmed), or the whole tag.
inline std::string entity_group_key(std::string_view name_tag) {
  auto pos = name_tag.find(':');
  std::string_view key = pos == std::string_view::npos ? name_tag : name_tag.substr(0, pos);
  return std::string(trim(key));
}

namespace detail {

inline const std::array<std::string_view, 7> kTransferHeader = {
    "block_number", "timestamp", "tx_hash", "from", "to", "token", "value"};

inline TransferRecord make_record(std::size_t line, std::string_view block,
                                  std::string_view ts, std::string_view hash,
                                  std::string_view from, std::string_view to,
                                  std::string_view token, std::string_view value) {
  TransferRecord rec;
  if (!parse_u64(block, rec.block_number))
    throw ParseError(line, "block_number", "not a non-negative integer");
  try {
    rec.timestamp = time::parse_timestamp(ts);
  } catch (const Error& e) {
    throw ParseError(line, "timestamp", e.what());
  }
  rec.tx_hash = to_lower(trim(hash));
  rec.from_addr = to_lower(trim(from));
  rec.to_addr = to_lower(trim(to));
  rec.token = to_lower(trim(token));
  rec.value = std::string(trim(value));
  if (rec.from_addr.empty()) throw ParseError(line, "from", "empty address");
  if (rec.to_addr.empty()) throw ParseError(line, "to", "empty address");
  if (rec.token.empty()) throw ParseError(line, "token", "empty token");
  return rec;
}

inline std::string json_field_as_string(const nlohmann::json& obj, const char* key,
                                        std::size_t line) {
  if (!obj.contains(key)) throw ParseError(line, key, "missing key");
  const auto& v = obj.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return fmt_double(v.get<double>());
  throw ParseError(line, key, "expected string or number");
}

}  // namespace detail

// Records come back in source order. Duplicate rows are kept: one transaction
// hash can carry several transfers.
inline std::vector<TransferRecord> parse_transfers(std::istream& in, TransferFormat format) {
  std::vector<TransferRecord> out;
  if (format == TransferFormat::csv) {
    csv::Reader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row)) return out;  // empty input: no records
    if (row.size() != detail::kTransferHeader.size())
      throw ParseError(reader.record_line(), "", "expected 7-column transfer header");
    std::array<std::size_t, 7> col{};
    std::vector<bool> used(row.size(), false);
    for (std::size_t i = 0; i < detail::kTransferHeader.size(); ++i) {
      bool found = false;
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (!used[j] && trim(row[j]) == detail::kTransferHeader[i]) {
          col[i] = j;
          used[j] = true;
          found = true;
          break;
        }
      }
      if (!found)
        throw ParseError(reader.record_line(), std::string(detail::kTransferHeader[i]),
                         "missing column in header");
    }
    while (reader.next(row)) {
      if (row.size() != detail::kTransferHeader.size())
        throw ParseError(reader.record_line(), "",
                         "expected 7 fields, got " + std::to_string(row.size()));
      out.push_back(detail::make_record(reader.record_line(), row[col[0]], row[col[1]],
                                        row[col[2]], row[col[3]], row[col[4]], row[col[5]],
                                        row[col[6]]));
    }
  } else {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string_view body = trim(line);
      if (body.empty()) continue;
      nlohmann::json obj = nlohmann::json::parse(body, nullptr, false);
      if (obj.is_discarded() || !obj.is_object())
        throw ParseError(line_no, "", "malformed JSON object");
      out.push_back(detail::make_record(
          line_no, detail::json_field_as_string(obj, "block_number", line_no),
          detail::json_field_as_string(obj, "timestamp", line_no),
          detail::json_field_as_string(obj, "tx_hash", line_no),
          detail::json_field_as_string(obj, "from", line_no),
          detail::json_field_as_string(obj, "to", line_no),
          detail::json_field_as_string(obj, "token", line_no),
          detail::json_field_as_string(obj, "value", line_no)));
    }
  }
  return out;
}

inline void write_transfers(std::ostream& os, std::span<const TransferRecord> records,
                            TransferFormat format) {
  if (format == TransferFormat::csv) {
    csv::write_row(os, detail::kTransferHeader);
    for (const auto& r : records) {
      csv::write_row(os, std::array<std::string, 7>{
                             std::to_string(r.block_number), std::to_string(r.timestamp),
                             r.tx_hash, r.from_addr, r.to_addr, r.token, r.value});
    }
  } else {
    for (const auto& r : records) {
      nlohmann::ordered_json obj;
      obj["block_number"] = r.block_number;
      obj["timestamp"] = r.timestamp;
      obj["tx_hash"] = r.tx_hash;
      obj["from"] = r.from_addr;
      obj["to"] = r.to_addr;
      obj["token"] = r.token;
      obj["value"] = r.value;
      os << obj.dump() << '\n';
    }
  }
}

// Labels CSV: header `address,name_tag,account_type`; empty name_tag allowed.
inline std::vector<AddressLabel> parse_labels_csv(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  std::vector<AddressLabel> out;
  if (!reader.next(row)) return out;
  if (row.size() != 3 || trim(row[0]) != "address" || trim(row[1]) != "name_tag" ||
      trim(row[2]) != "account_type")
    throw ParseError(reader.record_line(), "", "expected header address,name_tag,account_type");
  std::unordered_set<std::string> seen;
  while (reader.next(row)) {
    if (row.size() != 3)
      throw ParseError(reader.record_line(), "",
                       "expected 3 fields, got " + std::to_string(row.size()));
    AddressLabel label;
    label.address = to_lower(trim(row[0]));
    if (label.address.empty()) throw ParseError(reader.record_line(), "address", "empty address");
    if (!seen.insert(label.address).second)
      throw ParseError(reader.record_line(), "address", "duplicate address in label set");
    label.name_tag = std::string(trim(row[1]));
    std::string type = to_lower(trim(row[2]));
    if (type == "eoa") label.account_type = AccountType::eoa;
    else if (type == "ca") label.account_type = AccountType::ca;
    else if (type.empty() || type == "unknown") label.account_type = AccountType::unknown;
    else throw ParseError(reader.record_line(), "account_type", "expected EOA, CA or unknown");
    out.push_back(std::move(label));
  }
  return out;
}

// Plain-text list, one entry per line; '#' comments and blank lines skipped.
inline std::vector<std::string> read_line_list(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    out.emplace_back(body);
  }
  return out;
}

enum class EntityGrouping { entity, address };

// Addresses grouped into entities. At entity granularity the grouping key is
// the name-tag prefix before the first ':'; untagged addresses are singleton
// entities named by the address itself. At address granularity every address
// is its own entity, but ego classification still follows the tag prefix.
class EntityMap {
 public:
  using Id = std::uint32_t;

  // Total function over addresses: unknown ones resolve to a singleton
  // entity on the fly without mutating the map.
  struct Resolved {
    std::string name;
    bool ego;
  };

  Resolved resolve(const std::string& address) const {
    auto it = by_address_.find(address);
    if (it != by_address_.end()) return {names_[it->second], ego_[it->second] != 0};
    return {address, ego_keys_.count(address) > 0};
  }

  std::optional<Id> id_of(const std::string& address) const {
    auto it = by_address_.find(address);
    if (it == by_address_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t entity_count() const { return names_.size(); }
  const std::string& name(Id id) const { return names_[id]; }
  bool is_ego(Id id) const { return ego_[id] != 0; }
  const std::vector<std::string>& names() const { return names_; }
  bool key_is_ego(const std::string& key) const { return ego_keys_.count(key) > 0; }
  bool has_entity_named(const std::string& name) const { return by_key_.count(name) > 0; }

 private:
  friend EntityMap build_entity_map(std::span<const AddressLabel>,
                                    const std::set<std::string>&, EntityGrouping);

  Id intern(const std::string& key) {
    auto [it, inserted] = by_key_.emplace(key, static_cast<Id>(names_.size()));
    if (inserted) {
      names_.push_back(key);
      ego_.push_back(ego_keys_.count(key) ? 1 : 0);
    }
    return it->second;
  }

  std::unordered_map<std::string, Id> by_address_;
  std::unordered_map<std::string, Id> by_key_;  // entity name -> id
  std::vector<std::string> names_;
  std::vector<char> ego_;
  std::unordered_set<std::string> ego_keys_;
};

inline EntityMap build_entity_map(std::span<const AddressLabel> labels,
                                  const std::set<std::string>& ego_tags,
                                  EntityGrouping grouping = EntityGrouping::entity) {
  EntityMap map;
  map.ego_keys_.insert(ego_tags.begin(), ego_tags.end());
  for (const auto& label : labels) {
    std::string key = label.name_tag.empty() ? label.address : entity_group_key(label.name_tag);
    if (key.empty()) key = label.address;  // tag was only whitespace/':'
    if (grouping == EntityGrouping::address) {
      EntityMap::Id id = map.intern(label.address);
      // address-level nodes still classify as ego through the tag prefix
      if (map.ego_keys_.count(key)) map.ego_[id] = 1;
      map.by_address_[label.address] = id;
    } else {
      map.by_address_[label.address] = map.intern(key);
    }
  }
  return map;
}

struct TimeWindow {
  time::UnixSeconds start;
  time::UnixSeconds end;  // half-open [start, end)
};

// Keeps a record iff its token is allowed and its timestamp lies in the
// window. A present-but-empty allowlist drops everything; std::nullopt
// disables token filtering.
inline std::vector<TransferRecord> filter_transfers(
    std::span<const TransferRecord> records,
    const std::optional<std::unordered_set<std::string>>& allowlist,
    std::optional<TimeWindow> window = std::nullopt) {
  if (window && window->start >= window->end)
    throw Error("empty time window: start must precede end");
  std::vector<TransferRecord> out;
  for (const auto& r : records) {
    if (allowlist && allowlist->count(r.token) == 0) continue;
    if (window && (r.timestamp < window->start || r.timestamp >= window->end)) continue;
    out.push_back(r);
  }
  return out;
}

}  // namespace mtnet
