#pragma once

#include <memory>
#include <vector>

#include "ppc/errors.hpp"
#include "ppc/graph.hpp"
#include "ppc/types.hpp"

namespace ppc {

// Incremental view of an objective over one growing selection. Owned by a
// single solver run; not shared.
class ObjectiveTracker {
 public:
  virtual ~ObjectiveTracker() = default;
  virtual double utility() const = 0;
  virtual double gain(NodeId v) const = 0;
  virtual double gain_pair(NodeId u, NodeId v) const = 0;
  virtual void add(NodeId v) = 0;
};

// Monotone submodular utility with marginal-gain queries. Normalized so the
// empty selection has zero value.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual NodeId universe_size() const = 0;
  virtual double value(const Selection& s) const = 0;

  // f(s + v) - f(s); overridden where a direct recount is cheaper.
  virtual double gain(NodeId v, const Selection& s) const {
    Selection extended = s;
    extended.add(v);
    return value(extended) - value(s);
  }

  virtual std::unique_ptr<ObjectiveTracker> make_tracker() const;
};

inline double marginal_gain(NodeId v, const Selection& s, const Objective& obj) {
  if (s.contains(v)) {
    throw PreconditionError("marginal_gain: node already selected");
  }
  return obj.gain(v, s);
}

namespace detail {

// Fallback tracker: re-evaluates the objective from scratch.
class RecomputeTracker final : public ObjectiveTracker {
 public:
  explicit RecomputeTracker(const Objective& obj)
      : obj_(&obj), sel_(obj.universe_size()), value_(0.0) {}

  double utility() const override { return value_; }

  double gain(NodeId v) const override { return obj_->gain(v, sel_); }

  double gain_pair(NodeId u, NodeId v) const override {
    Selection extended = sel_;
    extended.add(u);
    extended.add(v);
    return obj_->value(extended) - value_;
  }

  void add(NodeId v) override {
    sel_.add(v);
    value_ = obj_->value(sel_);
  }

 private:
  const Objective* obj_;
  Selection sel_;
  double value_;
};

}  // namespace detail

inline std::unique_ptr<ObjectiveTracker> Objective::make_tracker() const {
  return std::make_unique<detail::RecomputeTracker>(*this);
}

// f(S) = |S|.
class CardinalityObjective final : public Objective {
 public:
  explicit CardinalityObjective(NodeId n) : n_(n) {}

  NodeId universe_size() const override { return n_; }
  double value(const Selection& s) const override { return static_cast<double>(s.size()); }
  double gain(NodeId, const Selection&) const override { return 1.0; }

  std::unique_ptr<ObjectiveTracker> make_tracker() const override {
    class Tracker final : public ObjectiveTracker {
     public:
      double utility() const override { return count_; }
      double gain(NodeId) const override { return 1.0; }
      double gain_pair(NodeId, NodeId) const override { return 2.0; }
      void add(NodeId) override { count_ += 1.0; }

     private:
      double count_ = 0.0;
    };
    return std::make_unique<Tracker>();
  }

 private:
  NodeId n_;
};

inline double cardinality_value(const Selection& s) { return static_cast<double>(s.size()); }

// Disk coverage: number of points of interest within `radius` of at least
// one selected sensor. Boundary ties (distance exactly equal to the radius)
// count as covered; comparisons are on squared distances.
class CoverageObjective final : public Objective {
 public:
  CoverageObjective(std::vector<Point> pois, std::vector<Point> sensors, double radius)
      : pois_(std::move(pois)), sensors_(std::move(sensors)), radius_(radius) {
    if (!(radius > 0.0)) throw ValidationError("coverage radius must be positive");
    const double r2 = radius_ * radius_;
    reach_.resize(sensors_.size());
    for (std::size_t s = 0; s < sensors_.size(); ++s) {
      for (std::size_t p = 0; p < pois_.size(); ++p) {
        if (squared_distance(sensors_[s], pois_[p]) <= r2) {
          reach_[s].push_back(static_cast<int>(p));
        }
      }
    }
  }

  NodeId universe_size() const override { return static_cast<NodeId>(sensors_.size()); }
  std::size_t poi_count() const { return pois_.size(); }
  double radius() const { return radius_; }
  const std::vector<Point>& pois() const { return pois_; }
  const std::vector<Point>& sensors() const { return sensors_; }

  // POIs reachable by one sensor, as indices into pois().
  const std::vector<int>& reach(NodeId v) const { return reach_[static_cast<std::size_t>(v)]; }

  double value(const Selection& s) const override {
    std::vector<char> covered(pois_.size(), 0);
    int count = 0;
    for (NodeId v : s.members()) {
      for (int p : reach_[static_cast<std::size_t>(v)]) {
        if (!covered[static_cast<std::size_t>(p)]) {
          covered[static_cast<std::size_t>(p)] = 1;
          ++count;
        }
      }
    }
    return static_cast<double>(count);
  }

  double gain(NodeId v, const Selection& s) const override {
    std::vector<char> covered(pois_.size(), 0);
    for (NodeId u : s.members()) {
      for (int p : reach_[static_cast<std::size_t>(u)]) covered[static_cast<std::size_t>(p)] = 1;
    }
    int count = 0;
    for (int p : reach_[static_cast<std::size_t>(v)]) {
      if (!covered[static_cast<std::size_t>(p)]) ++count;
    }
    return static_cast<double>(count);
  }

  std::unique_ptr<ObjectiveTracker> make_tracker() const override {
    return std::make_unique<Tracker>(*this);
  }

 private:
  class Tracker final : public ObjectiveTracker {
   public:
    explicit Tracker(const CoverageObjective& obj)
        : obj_(&obj), covered_(obj.pois_.size(), 0), stamp_(obj.pois_.size(), 0) {}

    double utility() const override { return static_cast<double>(covered_count_); }

    double gain(NodeId v) const override {
      int count = 0;
      for (int p : obj_->reach(v)) {
        if (!covered_[static_cast<std::size_t>(p)]) ++count;
      }
      return static_cast<double>(count);
    }

    double gain_pair(NodeId u, NodeId v) const override {
      ++current_stamp_;
      int count = 0;
      for (int p : obj_->reach(u)) {
        if (!covered_[static_cast<std::size_t>(p)]) {
          stamp_[static_cast<std::size_t>(p)] = current_stamp_;
          ++count;
        }
      }
      for (int p : obj_->reach(v)) {
        if (!covered_[static_cast<std::size_t>(p)] &&
            stamp_[static_cast<std::size_t>(p)] != current_stamp_) {
          ++count;
        }
      }
      return static_cast<double>(count);
    }

    void add(NodeId v) override {
      for (int p : obj_->reach(v)) {
        if (!covered_[static_cast<std::size_t>(p)]) {
          covered_[static_cast<std::size_t>(p)] = 1;
          ++covered_count_;
        }
      }
    }

   private:
    const CoverageObjective* obj_;
    std::vector<char> covered_;
    mutable std::vector<int> stamp_;
    mutable int current_stamp_ = 0;
    int covered_count_ = 0;
  };

  std::vector<Point> pois_;
  std::vector<Point> sensors_;
  double radius_;
  std::vector<std::vector<int>> reach_;
};

inline double coverage_value(const Selection& s, const CoverageObjective& obj) {
  return obj.value(s);
}

}  // namespace ppc
