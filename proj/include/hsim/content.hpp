#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hsim/topology.hpp"
#include "hsim/types.hpp"

namespace hsim {

struct Unit {
  UnitId id = 0;
  Bytes size = 0;
  KeywordId primary_keyword = 0;
  // Sorted ascending, contains primary_keyword.
  std::vector<KeywordId> keywords;
  NodeId origin_node = kNoNode;
};

struct SizeParams {
  Bytes mean = 2600 * kKB;
  Bytes min = 190 * kKB;
  Bytes max = 16 * kMB;
  // Shape of the underlying log-normal; the location is solved so the
  // truncated mean equals `mean`.
  double log_sigma = 0.9;
};

struct CatalogOptions {
  std::size_t units = 5000;
  std::size_t keywords = 1000;
  double zipf_exponent = 1.0;
  SizeParams sizes;
  int max_secondary_keywords = 2;
};

class Catalog {
 public:
  Catalog() = default;
  Catalog(std::vector<Unit> units, std::size_t keyword_count,
          double zipf_exponent);

  const std::vector<Unit>& units() const { return units_; }
  const Unit& unit(UnitId id) const { return units_.at(id); }
  std::size_t unit_count() const { return units_.size(); }
  std::size_t keyword_count() const { return by_keyword_.size(); }
  double zipf_exponent() const { return zipf_exponent_; }

  const std::vector<UnitId>& units_for(KeywordId k) const {
    return by_keyword_.at(k);
  }
  // Mean size in bytes of the units tagged with k.
  double mean_size(KeywordId k) const { return mean_size_.at(k); }
  Bytes total_bytes() const { return total_bytes_; }

  void assign_origins(const std::vector<NodeId>& origin);

 private:
  std::vector<Unit> units_;
  std::vector<std::vector<UnitId>> by_keyword_;
  std::vector<double> mean_size_;
  double zipf_exponent_ = 1.0;
  Bytes total_bytes_ = 0;
};

Catalog generate_catalog(const CatalogOptions& opts, std::uint64_t seed);

// Location parameter of a log-normal truncated to [lo, hi] with the given
// shape whose mean is `mean`.
double solve_truncated_lognormal_mu(double mean, double lo, double hi,
                                    double sigma);
double truncated_lognormal_mean(double mu, double sigma, double lo, double hi);

enum class Contribution { uniform, powerlaw };

struct StorageOptions {
  double fill_fraction = 0.30;
  Bytes capacity = 900 * kMB;
  Contribution contribution = Contribution::uniform;
  double contribution_exponent = 1.0;
};

struct Placement {
  std::vector<NodeId> origin;     // per unit
  std::vector<Bytes> node_bytes;  // per node
  std::vector<std::size_t> node_units;
};

// Places the single initial instance of every unit. No node exceeds
// fill_fraction * capacity.
Placement seed_initial_storage(const Overlay& overlay, const Catalog& catalog,
                               const StorageOptions& opts, std::uint64_t seed);

// "unit_id size_bytes kw,kw,..." per line.
void write_catalog(std::ostream& out, const Catalog& catalog);
Catalog read_catalog(std::istream& in, double zipf_exponent = 1.0);

}  // namespace hsim
