#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "zest/embed.hpp"
#include "zest/errors.hpp"
#include "zest/oracle.hpp"

namespace zest {

namespace {

enum class ColumnKind { key, numeric, date, text };

struct Column {
  const char* name;
  ColumnKind kind;
};

struct Table {
  const char* name;
  std::vector<Column> columns;
};

struct JoinEdge {
  std::size_t left;
  const char* left_column;
  std::size_t right;
  const char* right_column;
};

struct Catalog {
  const char* name;
  std::vector<Table> tables;
  std::vector<JoinEdge> edges;
};

const Catalog& tpch_catalog() {
  using K = ColumnKind;
  static const Catalog catalog{
      "tpch",
      {
          {"lineitem",
           {{"l_orderkey", K::key},
            {"l_partkey", K::key},
            {"l_suppkey", K::key},
            {"l_quantity", K::numeric},
            {"l_extendedprice", K::numeric},
            {"l_discount", K::numeric},
            {"l_shipdate", K::date},
            {"l_returnflag", K::text},
            {"l_shipmode", K::text}}},
          {"orders",
           {{"o_orderkey", K::key},
            {"o_custkey", K::key},
            {"o_orderdate", K::date},
            {"o_totalprice", K::numeric},
            {"o_orderpriority", K::text}}},
          {"customer",
           {{"c_custkey", K::key}, {"c_nationkey", K::key}, {"c_mktsegment", K::text}, {"c_acctbal", K::numeric}}},
          {"supplier", {{"s_suppkey", K::key}, {"s_nationkey", K::key}, {"s_acctbal", K::numeric}, {"s_name", K::text}}},
          {"nation", {{"n_nationkey", K::key}, {"n_regionkey", K::key}, {"n_name", K::text}}},
          {"region", {{"r_regionkey", K::key}, {"r_name", K::text}}},
          {"part",
           {{"p_partkey", K::key},
            {"p_brand", K::text},
            {"p_type", K::text},
            {"p_size", K::numeric},
            {"p_container", K::text}}},
          {"partsupp",
           {{"ps_partkey", K::key}, {"ps_suppkey", K::key}, {"ps_supplycost", K::numeric}, {"ps_availqty", K::numeric}}},
      },
      {
          {0, "l_orderkey", 1, "o_orderkey"},
          {1, "o_custkey", 2, "c_custkey"},
          {2, "c_nationkey", 4, "n_nationkey"},
          {3, "s_nationkey", 4, "n_nationkey"},
          {0, "l_suppkey", 3, "s_suppkey"},
          {0, "l_partkey", 6, "p_partkey"},
          {7, "ps_partkey", 6, "p_partkey"},
          {7, "ps_suppkey", 3, "s_suppkey"},
          {4, "n_regionkey", 5, "r_regionkey"},
      },
  };
  return catalog;
}

const Catalog& tpcds_catalog() {
  using K = ColumnKind;
  static const Catalog catalog{
      "tpcds",
      {
          {"store_sales",
           {{"ss_sold_date_sk", K::key},
            {"ss_item_sk", K::key},
            {"ss_customer_sk", K::key},
            {"ss_store_sk", K::key},
            {"ss_quantity", K::numeric},
            {"ss_sales_price", K::numeric},
            {"ss_net_profit", K::numeric}}},
          {"web_sales",
           {{"ws_sold_date_sk", K::key},
            {"ws_item_sk", K::key},
            {"ws_bill_customer_sk", K::key},
            {"ws_net_paid", K::numeric},
            {"ws_quantity", K::numeric}}},
          {"catalog_sales",
           {{"cs_sold_date_sk", K::key},
            {"cs_item_sk", K::key},
            {"cs_bill_customer_sk", K::key},
            {"cs_sales_price", K::numeric},
            {"cs_quantity", K::numeric}}},
          {"inventory", {{"inv_date_sk", K::key}, {"inv_item_sk", K::key}, {"inv_quantity_on_hand", K::numeric}}},
          {"date_dim", {{"d_date_sk", K::key}, {"d_year", K::numeric}, {"d_moy", K::numeric}, {"d_dom", K::numeric}}},
          {"item",
           {{"i_item_sk", K::key},
            {"i_brand_id", K::numeric},
            {"i_category", K::text},
            {"i_manufact_id", K::numeric},
            {"i_current_price", K::numeric}}},
          {"store", {{"s_store_sk", K::key}, {"s_state", K::text}, {"s_city", K::text}}},
          {"customer", {{"c_customer_sk", K::key}, {"c_current_addr_sk", K::key}, {"c_birth_year", K::numeric}}},
          {"customer_address", {{"ca_address_sk", K::key}, {"ca_state", K::text}, {"ca_gmt_offset", K::numeric}}},
      },
      {
          {0, "ss_sold_date_sk", 4, "d_date_sk"},
          {0, "ss_item_sk", 5, "i_item_sk"},
          {0, "ss_store_sk", 6, "s_store_sk"},
          {0, "ss_customer_sk", 7, "c_customer_sk"},
          {7, "c_current_addr_sk", 8, "ca_address_sk"},
          {1, "ws_sold_date_sk", 4, "d_date_sk"},
          {1, "ws_item_sk", 5, "i_item_sk"},
          {1, "ws_bill_customer_sk", 7, "c_customer_sk"},
          {2, "cs_sold_date_sk", 4, "d_date_sk"},
          {2, "cs_item_sk", 5, "i_item_sk"},
          {2, "cs_bill_customer_sk", 7, "c_customer_sk"},
          {3, "inv_date_sk", 4, "d_date_sk"},
          {3, "inv_item_sk", 5, "i_item_sk"},
      },
  };
  return catalog;
}

struct ColumnRef {
  std::size_t table;
  std::size_t column;
};

struct FamilyTemplate {
  const Catalog* catalog;
  std::vector<std::size_t> tables;      // join order
  std::vector<JoinEdge> joins;          // joins[i] attaches tables[i + 1]
  std::vector<ColumnRef> filters;       // predicates with member-specific literals
  ColumnRef group;
  ColumnRef measure;
  std::string aggregate;
  double compute_intensity;
  double shuffle_fraction;
  double mem_per_task_gb;
  double driver_load;
};

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

FamilyTemplate make_family(int family, std::mt19937_64& rng) {
  FamilyTemplate t;
  t.catalog = family % 2 == 0 ? &tpch_catalog() : &tpcds_catalog();
  const auto& cat = *t.catalog;

  const std::size_t want = 2 + pick(rng, 3);
  t.tables.push_back(pick(rng, cat.tables.size()));
  while (t.tables.size() < want) {
    std::vector<JoinEdge> frontier;
    for (const auto& e : cat.edges) {
      const bool has_l = std::count(t.tables.begin(), t.tables.end(), e.left) > 0;
      const bool has_r = std::count(t.tables.begin(), t.tables.end(), e.right) > 0;
      if (has_l != has_r) frontier.push_back(has_l ? e : JoinEdge{e.right, e.right_column, e.left, e.left_column});
    }
    if (frontier.empty()) break;
    const auto& e = frontier[pick(rng, frontier.size())];
    t.joins.push_back(e);
    t.tables.push_back(e.right);
  }

  std::vector<ColumnRef> non_key;
  std::vector<ColumnRef> numeric;
  for (std::size_t ti : t.tables) {
    const auto& cols = cat.tables[ti].columns;
    for (std::size_t ci = 0; ci < cols.size(); ++ci) {
      if (cols[ci].kind == ColumnKind::key) continue;
      non_key.push_back({ti, ci});
      if (cols[ci].kind == ColumnKind::numeric) numeric.push_back({ti, ci});
    }
  }
  std::shuffle(non_key.begin(), non_key.end(), rng);
  const std::size_t n_filters = std::min<std::size_t>(1 + pick(rng, 2), non_key.size());
  t.filters.assign(non_key.begin(), non_key.begin() + static_cast<std::ptrdiff_t>(n_filters));
  t.group = non_key[pick(rng, non_key.size())];
  t.measure = numeric.empty() ? non_key.front() : numeric[pick(rng, numeric.size())];
  static const char* const kAggregates[] = {"sum", "avg", "max", "count"};
  t.aggregate = kAggregates[pick(rng, 4)];

  t.compute_intensity = uniform(rng, 1.0, 4.0);
  t.shuffle_fraction = uniform(rng, 0.6, 1.0);
  t.mem_per_task_gb = uniform(rng, 0.5, 4.0);
  t.driver_load = uniform(rng, 0.5, 8.0);
  return t;
}

struct GenNode {
  std::string text;
  std::vector<GenNode> children;
};

void render_tree(const GenNode& node, const std::string& prefix, bool is_root, bool last, std::string& out) {
  if (!is_root) out += prefix + (last ? "+- " : ":- ");
  out += node.text;
  out.push_back('\n');
  const std::string child_prefix = is_root ? "" : prefix + (last ? "   " : ":  ");
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    render_tree(node.children[i], child_prefix, false, i + 1 == node.children.size(), out);
  }
}

std::string literal_for(ColumnKind kind, std::mt19937_64& rng) {
  switch (kind) {
    case ColumnKind::date: {
      std::ostringstream s;
      s << 1992 + pick(rng, 7) << '-' << std::setw(2) << std::setfill('0') << 1 + pick(rng, 12) << "-01";
      return s.str();
    }
    case ColumnKind::text: {
      static const char* const kWords[] = {"BUILDING", "AUTOMOBILE", "MAIL", "SHIP", "R", "GERMANY", "Books", "TN"};
      return std::string("'") + kWords[pick(rng, 8)] + "'";
    }
    default:
      return std::to_string(1 + pick(rng, 500));
  }
}

std::string plan_for_member(const FamilyTemplate& t, int member, long size_gb, std::mt19937_64& member_rng) {
  const auto& cat = *t.catalog;
  int next_id = 7 * member + 3;
  std::map<std::pair<std::size_t, std::size_t>, int> ids;
  auto col = [&](std::size_t table, std::size_t column) {
    auto [it, inserted] = ids.try_emplace({table, column}, next_id);
    if (inserted) ++next_id;
    return std::string(cat.tables[table].columns[column].name) + "#" + std::to_string(it->second);
  };
  auto col_by_name = [&](std::size_t table, const char* name) {
    const auto& cols = cat.tables[table].columns;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (std::string_view(cols[i].name) == name) return col(table, i);
    }
    return std::string(name);
  };

  const std::string database = "spark_catalog." + std::string(cat.name) + "_sf" + std::to_string(size_gb);
  auto relation = [&](std::size_t table) {
    std::string text = "Relation " + database + "." + cat.tables[table].name + "[";
    const auto& cols = cat.tables[table].columns;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i > 0) text += ",";
      text += col(table, i);
    }
    return GenNode{text + "] parquet", {}};
  };
  auto scan = [&](std::size_t table) {
    GenNode node = relation(table);
    std::string predicate;
    for (const auto& f : t.filters) {
      if (f.table != table) continue;
      const auto& c = cat.tables[table].columns[f.column];
      const char* op = c.kind == ColumnKind::text ? " = " : (c.kind == ColumnKind::date ? " >= " : " > ");
      const auto name = col(f.table, f.column);
      const auto clause = "(isnotnull(" + name + ") AND (" + name + op + literal_for(c.kind, member_rng) + "))";
      predicate = predicate.empty() ? clause : "(" + predicate + " AND " + clause + ")";
    }
    if (predicate.empty()) return node;
    return GenNode{"Filter " + predicate, {std::move(node)}};
  };

  GenNode tree = scan(t.tables.front());
  for (std::size_t i = 0; i < t.joins.size(); ++i) {
    const auto& e = t.joins[i];
    GenNode join{"Join Inner, (" + col_by_name(e.left, e.left_column) + " = " + col_by_name(e.right, e.right_column) +
                     ")",
                 {std::move(tree), scan(e.right)}};
    tree = std::move(join);
  }

  const auto group = col(t.group.table, t.group.column);
  const auto measure = col(t.measure.table, t.measure.column);
  GenNode project{"Project [" + group + ", " + measure + "]", {std::move(tree)}};
  const auto metric = t.aggregate + "_" + cat.tables[t.measure.table].columns[t.measure.column].name + "#" +
                      std::to_string(next_id++);
  GenNode root{"Aggregate [" + group + "], [" + group + ", " + t.aggregate + "(" + measure + ") AS " + metric + "]",
               {std::move(project)}};

  switch (member % 3) {
    case 1:
      root = GenNode{"Sort [" + metric + " DESC NULLS LAST], true", {std::move(root)}};
      break;
    case 2:
      root = GenNode{"GlobalLimit 100", {GenNode{"LocalLimit 100", {std::move(root)}}}};
      break;
    default:
      break;
  }

  std::string out;
  render_tree(root, "", true, true, out);
  out.pop_back();
  return out;
}

}  // namespace

std::vector<WorkloadSpec> generate_suite(int n_families, int members_per_family, std::span<const double> sizes_gb,
                                         std::uint64_t seed) {
  if (n_families <= 0 || members_per_family <= 0) throw std::invalid_argument("suite counts must be positive");
  if (sizes_gb.empty()) throw std::invalid_argument("suite needs at least one input size");
  for (double s : sizes_gb) {
    if (!(s > 0.0)) throw std::invalid_argument("input sizes must be positive");
  }

  std::vector<WorkloadSpec> suite;
  for (int f = 0; f < n_families; ++f) {
    std::mt19937_64 family_rng(feature_hash("family:" + std::to_string(f), seed));
    const auto tmpl = make_family(f, family_rng);
    for (int m = 0; m < members_per_family; ++m) {
      std::mt19937_64 member_rng(feature_hash("member:" + std::to_string(f) + ":" + std::to_string(m), seed));
      auto jitter = [&] { return uniform(member_rng, 0.9, 1.1); };
      const double ci = tmpl.compute_intensity * jitter();
      const double sf = std::min(1.0, tmpl.shuffle_fraction * jitter());
      const double mem = tmpl.mem_per_task_gb * jitter();
      const double dl = tmpl.driver_load * jitter();
      const auto literal_state = member_rng();
      for (double size : sizes_gb) {
        // Literals stay fixed across sizes: the same query run on bigger data.
        std::mt19937_64 literal_rng(literal_state);
        WorkloadSpec w;
        w.workload_id = "fam" + std::to_string(f) + "-q" + std::to_string(m);
        w.family_id = "fam" + std::to_string(f);
        w.catalog = tmpl.catalog->name;
        w.input_gb = size;
        w.compute_intensity = ci;
        w.shuffle_fraction = sf;
        w.mem_per_task_gb = mem;
        w.driver_load = dl;
        w.plan_text = plan_for_member(tmpl, m, std::lround(size), literal_rng);
        suite.push_back(std::move(w));
      }
    }
  }
  return suite;
}

std::vector<WorkloadSpec> read_suite(std::istream& in, const std::string& source) {
  std::vector<WorkloadSpec> suite;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = source + ":" + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      WorkloadSpec w;
      w.workload_id = j.at("workload_id").get<std::string>();
      w.family_id = j.value("family_id", std::string());
      w.catalog = j.value("catalog", std::string());
      w.input_gb = j.at("input_gb").get<double>();
      w.compute_intensity = j.at("compute_intensity").get<double>();
      w.shuffle_fraction = j.at("shuffle_fraction").get<double>();
      w.mem_per_task_gb = j.at("mem_per_task_gb").get<double>();
      w.driver_load = j.at("driver_load").get<double>();
      w.plan_text = j.at("plan_text").get<std::string>();
      w.validate();
      suite.push_back(std::move(w));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where, e.what());
    } catch (const InvalidWorkload& e) {
      throw DataError(where, e.what());
    }
  }
  return suite;
}

std::vector<WorkloadSpec> read_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open suite " + path.string());
  return read_suite(in, path.string());
}

void write_suite(std::ostream& out, std::span<const WorkloadSpec> suite) {
  for (const auto& w : suite) {
    nlohmann::ordered_json j;
    j["workload_id"] = w.workload_id;
    j["family_id"] = w.family_id;
    j["catalog"] = w.catalog;
    j["input_gb"] = w.input_gb;
    j["compute_intensity"] = w.compute_intensity;
    j["shuffle_fraction"] = w.shuffle_fraction;
    j["mem_per_task_gb"] = w.mem_per_task_gb;
    j["driver_load"] = w.driver_load;
    j["plan_text"] = w.plan_text;
    out << j.dump() << '\n';
  }
}

void write_suite(const std::filesystem::path& path, std::span<const WorkloadSpec> suite) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write suite " + path.string());
  write_suite(out, suite);
}

}  // namespace zest
