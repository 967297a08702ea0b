#include "xjoin/query.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace xjoin {

std::string_view to_string(Aggregate aggregate) {
  switch (aggregate) {
    case Aggregate::Sum: return "sum";
    case Aggregate::Avg: return "avg";
    case Aggregate::Count: return "count";
    case Aggregate::Min: return "min";
    case Aggregate::Max: return "max";
  }
  return "sum";
}

std::optional<Aggregate> parse_aggregate(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (const auto aggregate : {Aggregate::Sum, Aggregate::Avg, Aggregate::Count, Aggregate::Min, Aggregate::Max}) {
    if (lower == to_string(aggregate)) {
      return aggregate;
    }
  }
  return std::nullopt;
}

namespace {

void check_well_formed(const Query& query) {
  if (query.measureId.empty()) {
    throw QueryError("query has no measure");
  }
  for (const auto& predicate : query.predicates) {
    if (predicate.dimensionName.empty() || predicate.attributeName.empty() || predicate.value.empty()) {
      throw QueryError("predicate fields must be non-empty");
    }
  }
  for (const auto& key : query.groupBy) {
    if (key.dimensionName.empty() || key.attributeName.empty()) {
      throw QueryError("group-by fields must be non-empty");
    }
  }
}

/// Query terms that concern one dimension.
struct DimensionTerms {
  std::string_view name;
  std::vector<const Predicate*> predicates;
  std::vector<std::size_t> groupSlots;  // positions in query.groupBy
};

std::vector<DimensionTerms> collect_terms(const Query& query) {
  std::vector<DimensionTerms> terms;
  auto slot_for = [&terms](std::string_view name) -> DimensionTerms& {
    for (auto& entry : terms) {
      if (entry.name == name) {
        return entry;
      }
    }
    return terms.emplace_back(DimensionTerms{name, {}, {}});
  };
  for (const auto& predicate : query.predicates) {
    slot_for(predicate.dimensionName).predicates.push_back(&predicate);
  }
  for (std::size_t i = 0; i < query.groupBy.size(); ++i) {
    slot_for(query.groupBy[i].dimensionName).groupSlots.push_back(i);
  }
  return terms;
}

struct Accumulator {
  double sum = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;

  void add(double value) {
    sum += value;
    min = std::min(min, value);
    max = std::max(max, value);
    ++count;
  }

  double result(Aggregate aggregate) const {
    switch (aggregate) {
      case Aggregate::Sum: return sum;
      case Aggregate::Avg: return sum / static_cast<double>(count);
      case Aggregate::Count: return static_cast<double>(count);
      case Aggregate::Min: return min;
      case Aggregate::Max: return max;
    }
    return sum;
  }
};

// Keys reference strings owned by the input model, which outlives the execution.
using GroupKey = std::vector<std::string_view>;
using Groups = std::map<GroupKey, Accumulator>;

const Measure* find_measure(const std::vector<Measure>& measures, std::string_view id) {
  for (const auto& measure : measures) {
    if (measure.id == id) {
      return &measure;
    }
  }
  return nullptr;
}

void accumulate(Groups& groups, const GroupKey& key, const std::vector<Measure>& measures, const Query& query,
                std::size_t cell_ordinal) {
  const Measure* measure = find_measure(measures, query.measureId);
  if (measure == nullptr) {
    throw QueryError("measure '" + query.measureId + "' missing in contributing cell " + std::to_string(cell_ordinal));
  }
  auto it = groups.find(key);
  if (it == groups.end()) {
    it = groups.emplace(key, Accumulator{}).first;
  }
  it->second.add(measure->value);
}

std::vector<ResultRow> to_rows(const Groups& groups, const Query& query) {
  std::vector<ResultRow> rows;
  rows.reserve(groups.size());
  for (const auto& [key, accumulator] : groups) {
    ResultRow row;
    row.key.reserve(key.size());
    for (std::size_t i = 0; i < key.size(); ++i) {
      row.key.push_back(KeyPart{query.groupBy[i].dimensionName, query.groupBy[i].attributeName, std::string(key[i])});
    }
    row.aggregateValue = accumulator.result(query.aggregate);
    row.rowCount = accumulator.count;
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Marks in `satisfied` the predicates that `attribute` fulfils.
inline void check_predicates(const AttributeKV& attribute, const std::vector<const Predicate*>& predicates,
                             std::vector<char>& satisfied) {
  for (std::size_t p = 0; p < predicates.size(); ++p) {
    if (attribute.name == predicates[p]->attributeName && attribute.value == predicates[p]->value) {
      satisfied[p] = 1;
    }
  }
}

inline bool all_set(const std::vector<char>& flags) {
  return std::all_of(flags.begin(), flags.end(), [](char f) { return f != 0; });
}

bool dimension_has_attribute(const Dimension& dimension, std::string_view attribute_name) {
  for (const auto& node : dimension.nodes) {
    for (const auto& attribute : node.attributes) {
      if (attribute.name == attribute_name) {
        return true;
      }
    }
  }
  return false;
}

void check_against_catalog(const Warehouse& warehouse, const Query& query) {
  auto check = [&warehouse](const std::string& dimension_name, const std::string& attribute_name) {
    const Dimension* dimension = find_dimension(warehouse, dimension_name);
    if (dimension == nullptr) {
      throw QueryError("unknown dimension '" + dimension_name + "'");
    }
    if (!dimension_has_attribute(*dimension, attribute_name)) {
      throw QueryError("unknown attribute '" + attribute_name + "' in dimension '" + dimension_name + "'");
    }
  };
  for (const auto& predicate : query.predicates) {
    check(predicate.dimensionName, predicate.attributeName);
  }
  for (const auto& key : query.groupBy) {
    check(key.dimensionName, key.attributeName);
  }
}

}  // namespace

std::vector<ResultRow> execute_join_path(const Warehouse& warehouse, const Query& query, ExecutionCounters* counters) {
  check_well_formed(query);
  check_against_catalog(warehouse, query);

  const auto terms = collect_terms(query);
  // Terms per catalog position, so a located Level maps to its query terms directly.
  std::vector<const DimensionTerms*> terms_by_level(warehouse.dimensions.size(), nullptr);
  std::vector<std::size_t> term_position_by_level(warehouse.dimensions.size(), 0);
  for (std::size_t l = 0; l < warehouse.dimensions.size(); ++l) {
    for (std::size_t t = 0; t < terms.size(); ++t) {
      if (terms[t].name == warehouse.dimensions[l].name) {
        terms_by_level[l] = &terms[t];
        term_position_by_level[l] = t;
      }
    }
  }

  ExecutionCounters local;
  Groups groups;
  GroupKey key(query.groupBy.size());
  std::vector<char> term_found(terms.size());
  std::vector<char> satisfied;
  std::vector<const DimensionNode*> qualifying;
  static const std::vector<const Predicate*> kNoPredicates;

  for (std::size_t c = 0; c < warehouse.cells.size(); ++c) {
    const auto& cell = warehouse.cells[c];
    std::fill(key.begin(), key.end(), std::string_view{});
    std::fill(term_found.begin(), term_found.end(), 0);
    bool contributes = true;

    for (const auto& ref : cell.dimensionRefs) {
      // Locate the Level named by the reference; every Level is visited.
      std::size_t level_index = warehouse.dimensions.size();
      for (std::size_t l = 0; l < warehouse.dimensions.size(); ++l) {
        ++local.nodeVisits;
        if (warehouse.dimensions[l].name == ref.dimensionName) {
          level_index = l;
        }
      }
      if (level_index == warehouse.dimensions.size()) {
        contributes = false;
        continue;
      }
      const Dimension& level = warehouse.dimensions[level_index];
      const DimensionTerms* dimension_terms = terms_by_level[level_index];
      const auto& predicates = dimension_terms != nullptr ? dimension_terms->predicates : kNoPredicates;

      // Traverse every node and attribute of the Level, keeping the nodes that satisfy the conditions.
      qualifying.clear();
      for (const auto& node : level.nodes) {
        satisfied.assign(predicates.size(), 0);
        for (const auto& attribute : node.attributes) {
          ++local.nodeVisits;
          check_predicates(attribute, predicates, satisfied);
        }
        if (all_set(satisfied)) {
          qualifying.push_back(&node);
        }
      }

      // Join: probe the fact's foreign key against the qualifying node ids.
      const DimensionNode* match = nullptr;
      for (const DimensionNode* candidate : qualifying) {
        ++local.joinComparisons;
        if (candidate->id == ref.nodeId) {
          match = candidate;
          break;
        }
      }

      if (dimension_terms == nullptr) {
        continue;
      }
      term_found[term_position_by_level[level_index]] = 1;
      if (match == nullptr) {
        contributes = false;
        continue;
      }
      for (const std::size_t slot : dimension_terms->groupSlots) {
        for (const auto& attribute : match->attributes) {
          if (attribute.name == query.groupBy[slot].attributeName) {
            key[slot] = attribute.value;
            break;
          }
        }
      }
    }

    for (std::size_t t = 0; t < terms.size(); ++t) {
      if (!term_found[t] && !terms[t].predicates.empty()) {
        contributes = false;
      }
    }
    if (contributes) {
      accumulate(groups, key, cell.measures, query, c);
    }
  }

  if (counters != nullptr) {
    *counters = local;
  }
  return to_rows(groups, query);
}

std::vector<ResultRow> execute_index_path(const JoinIndex& index, const Query& query, ExecutionCounters* counters) {
  check_well_formed(query);
  const auto terms = collect_terms(query);

  // Whether each dimension / attribute named by the query was seen in the index.
  std::vector<char> dimension_seen(terms.size(), 0);
  std::vector<char> predicate_seen(query.predicates.size(), 0);
  std::vector<char> group_seen(query.groupBy.size(), 0);
  auto predicate_position = [&query](const Predicate* predicate) {
    return static_cast<std::size_t>(predicate - query.predicates.data());
  };

  ExecutionCounters local;
  Groups groups;
  GroupKey key(query.groupBy.size());
  std::vector<char> key_set(query.groupBy.size());
  std::vector<char> term_found(terms.size());
  std::vector<char> satisfied;

  for (std::size_t c = 0; c < index.cells.size(); ++c) {
    const auto& cell = index.cells[c];
    std::fill(key.begin(), key.end(), std::string_view{});
    std::fill(key_set.begin(), key_set.end(), 0);
    std::fill(term_found.begin(), term_found.end(), 0);
    bool contributes = true;

    for (const auto& dimension : cell.dimensions) {
      ++local.nodeVisits;
      std::size_t t = 0;
      while (t < terms.size() && terms[t].name != dimension.dimensionName) {
        ++t;
      }
      if (t == terms.size() || term_found[t]) {
        continue;
      }
      const auto& dimension_terms = terms[t];
      term_found[t] = 1;
      dimension_seen[t] = 1;

      satisfied.assign(dimension_terms.predicates.size(), 0);
      for (const auto& attribute : dimension.attributes) {
        ++local.nodeVisits;
        for (std::size_t p = 0; p < dimension_terms.predicates.size(); ++p) {
          const Predicate* predicate = dimension_terms.predicates[p];
          if (attribute.name == predicate->attributeName) {
            predicate_seen[predicate_position(predicate)] = 1;
            if (attribute.value == predicate->value) {
              satisfied[p] = 1;
            }
          }
        }
        for (const std::size_t slot : dimension_terms.groupSlots) {
          if (!key_set[slot] && attribute.name == query.groupBy[slot].attributeName) {
            key[slot] = attribute.value;
            key_set[slot] = 1;
            group_seen[slot] = 1;
          }
        }
      }
      if (!all_set(satisfied)) {
        contributes = false;
      }
    }

    for (std::size_t t = 0; t < terms.size(); ++t) {
      if (!term_found[t] && !terms[t].predicates.empty()) {
        contributes = false;
      }
    }
    if (contributes) {
      accumulate(groups, key, cell.facts, query, c);
    }
  }

  if (!index.cells.empty()) {
    for (std::size_t t = 0; t < terms.size(); ++t) {
      if (!dimension_seen[t]) {
        throw QueryError("unknown dimension '" + std::string(terms[t].name) + "'");
      }
    }
    for (std::size_t p = 0; p < query.predicates.size(); ++p) {
      if (!predicate_seen[p]) {
        throw QueryError("unknown attribute '" + query.predicates[p].attributeName + "' in dimension '" +
                         query.predicates[p].dimensionName + "'");
      }
    }
    for (std::size_t g = 0; g < query.groupBy.size(); ++g) {
      if (!group_seen[g]) {
        // A group key may legitimately be absent from cells that never matched; look once more.
        bool found = false;
        for (const auto& cell : index.cells) {
          for (const auto& dimension : cell.dimensions) {
            if (dimension.dimensionName != query.groupBy[g].dimensionName) {
              continue;
            }
            for (const auto& attribute : dimension.attributes) {
              found = found || attribute.name == query.groupBy[g].attributeName;
            }
          }
          if (found) {
            break;
          }
        }
        if (!found) {
          throw QueryError("unknown attribute '" + query.groupBy[g].attributeName + "' in dimension '" +
                           query.groupBy[g].dimensionName + "'");
        }
      }
    }
  }

  if (counters != nullptr) {
    *counters = local;
  }
  return to_rows(groups, query);
}

std::uint64_t count_join_comparisons(const Warehouse& warehouse, const Query& query) {
  ExecutionCounters counters;
  (void)execute_join_path(warehouse, query, &counters);
  return counters.joinComparisons;
}

std::uint64_t count_join_comparisons(const JoinIndex& index, const Query& query) {
  ExecutionCounters counters;
  (void)execute_index_path(index, query, &counters);
  return counters.joinComparisons;
}

namespace {

std::pair<std::string, std::string> split_qualified(std::string_view text, std::string_view what) {
  const auto dot = text.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == text.size()) {
    throw QueryError(std::string(what) + " '" + std::string(text) + "' is not of the form <dimension>.<attribute>");
  }
  return {std::string(text.substr(0, dot)), std::string(text.substr(dot + 1))};
}

}  // namespace

Query parse_query(std::string_view aggregate, const std::vector<std::string>& where, std::string_view group_by) {
  Query query;
  const auto colon = aggregate.find(':');
  if (colon == std::string_view::npos) {
    throw QueryError("aggregate '" + std::string(aggregate) + "' is not of the form <function>:<measure>");
  }
  const auto function = parse_aggregate(aggregate.substr(0, colon));
  if (!function) {
    throw QueryError("unknown aggregate function '" + std::string(aggregate.substr(0, colon)) + "'");
  }
  query.aggregate = *function;
  query.measureId = std::string(aggregate.substr(colon + 1));
  if (query.measureId.empty()) {
    throw QueryError("aggregate '" + std::string(aggregate) + "' names no measure");
  }

  for (const auto& term : where) {
    const auto eq = term.find('=');
    if (eq == std::string::npos || eq + 1 == term.size()) {
      throw QueryError("predicate '" + term + "' is not of the form <dimension>.<attribute>=<value>");
    }
    auto [dimension, attribute] = split_qualified(std::string_view(term).substr(0, eq), "predicate");
    query.predicates.push_back(Predicate{std::move(dimension), std::move(attribute), term.substr(eq + 1)});
  }

  std::string_view rest = group_by;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    auto [dimension, attribute] = split_qualified(item, "group-by key");
    query.groupBy.push_back(GroupKeyRef{std::move(dimension), std::move(attribute)});
    if (comma == std::string_view::npos) {
      break;
    }
    rest.remove_prefix(comma + 1);
    if (rest.empty()) {
      throw QueryError("trailing comma in group-by list");
    }
  }
  return query;
}

namespace {

void write_csv_field(std::ostream& out, std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    out << field;
    return;
  }
  out << '"';
  for (const char c : field) {
    if (c == '"') {
      out << '"';
    }
    out << c;
  }
  out << '"';
}

}  // namespace

std::string format_result_csv(const Query& query, const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  for (const auto& key : query.groupBy) {
    write_csv_field(out, key.dimensionName + "." + key.attributeName);
    out << ',';
  }
  out << to_string(query.aggregate) << '(';
  write_csv_field(out, query.measureId);
  out << "),row_count\n";
  for (const auto& row : rows) {
    for (const auto& part : row.key) {
      write_csv_field(out, part.value);
      out << ',';
    }
    if (query.aggregate == Aggregate::Count) {
      out << row.rowCount;
    } else {
      out << format_number(row.aggregateValue);
    }
    out << ',' << row.rowCount << '\n';
  }
  return std::move(out).str();
}

}  // namespace xjoin
