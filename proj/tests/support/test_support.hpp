#pragma once

#include <filesystem>
#include <random>
#include <string>

namespace zest::test {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("zest-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Spark-style dumps shaped after TPC-H Q21 and Q2; both join supplier and nation.
inline const char* kQ21Like = R"(== Analyzed Logical Plan ==
GlobalLimit 100
+- LocalLimit 100
   +- Sort [numwait#120L DESC NULLS LAST, s_name#34 ASC NULLS FIRST], true
      +- Aggregate [s_name#34], [s_name#34, count(1) AS numwait#120L]
         +- Filter ((s_nationkey#37L = n_nationkey#88L) AND (n_name#89 = SAUDI ARABIA))
            +- Join Inner, (s_suppkey#33L = l_suppkey#52L)
               :- Join Inner, (o_orderkey#70L = l_orderkey#50L)
               :  :- Relation spark_catalog.tpch_sf100.lineitem[l_orderkey#50L,l_suppkey#52L,l_receiptdate#62,l_commitdate#61] parquet
               :  +- Filter (o_orderstatus#72 = F)
               :     +- Relation spark_catalog.tpch_sf100.orders[o_orderkey#70L,o_orderstatus#72] parquet
               +- Join Inner, (s_nationkey#37L = n_nationkey#88L)
                  :- Relation spark_catalog.tpch_sf100.supplier[s_suppkey#33L,s_name#34,s_nationkey#37L] parquet
                  +- Relation spark_catalog.tpch_sf100.nation[n_nationkey#88L,n_name#89] parquet
)";

inline const char* kQ2Like = R"(== Analyzed Logical Plan ==
GlobalLimit 100
+- LocalLimit 100
   +- Sort [s_acctbal#15 DESC NULLS LAST, n_name#22 ASC NULLS FIRST], true
      +- Project [s_acctbal#15, s_name#11, n_name#22, p_partkey#1L]
         +- Join Inner, (s_nationkey#14L = n_nationkey#21L)
            :- Join Inner, (s_suppkey#10L = ps_suppkey#31L)
            :  :- Join Inner, (p_partkey#1L = ps_partkey#30L)
            :  :  :- Filter ((p_size#6 = 15) AND EndsWith(p_type#5, BRASS))
            :  :  :  +- Relation spark_catalog.tpch_sf100.part[p_partkey#1L,p_size#6,p_type#5] parquet
            :  :  +- Relation spark_catalog.tpch_sf100.partsupp[ps_partkey#30L,ps_suppkey#31L,ps_supplycost#33] parquet
            :  +- Relation spark_catalog.tpch_sf100.supplier[s_suppkey#10L,s_name#11,s_nationkey#14L,s_acctbal#15] parquet
            +- Relation spark_catalog.tpch_sf100.nation[n_nationkey#21L,n_name#22] parquet
)";

}  // namespace zest::test
