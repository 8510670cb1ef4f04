#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hvmforge/errors.hpp"
#include "hvmforge/point.hpp"
#include "hvmforge/rational.hpp"

namespace hvmforge {

// An exact finite probability distribution: an ordered alphabet of
// pairwise distinct points plus a mass map. Masses are nonnegative
// rationals summing to exactly 1; only positive masses are stored.
// Immutable after construction.
class Dist {
  public:
    Dist(std::vector<Point> alphabet, std::map<Point, Rational> mass)
        : alphabet_(std::move(alphabet)) {
        std::set<Point> seen;
        for (const Point& p : alphabet_) {
            if (!seen.insert(p).second) {
                throw ValidationError("alphabet point '" + p.to_string() + "' repeated");
            }
        }
        Rational total = 0;
        for (auto& [p, m] : mass) {
            if (m < 0) {
                throw ValidationError("negative mass at '" + p.to_string() + "'");
            }
            if (m == 0) continue;
            if (!seen.contains(p)) {
                throw ValidationError("mass on point '" + p.to_string() +
                                      "' outside the alphabet");
            }
            total += m;
            mass_.emplace(p, m);
        }
        if (total != 1) {
            throw ValidationError("masses sum to " + format_rational(total) +
                                  ", expected 1");
        }
    }

    static Dist point_mass(Point p) {
        std::map<Point, Rational> m;
        m.emplace(p, 1);
        std::vector<Point> alphabet{std::move(p)};
        return Dist(std::move(alphabet), std::move(m));
    }

    static Dist uniform(std::vector<Point> alphabet) {
        if (alphabet.empty()) throw EmptyInput("uniform distribution over empty alphabet");
        std::map<Point, Rational> m;
        const Rational w(1, static_cast<long>(alphabet.size()));
        for (const Point& p : alphabet) m.emplace(p, w);
        return Dist(std::move(alphabet), std::move(m));
    }

    const std::vector<Point>& alphabet() const { return alphabet_; }

    // Exact mass; zero for alphabet points without an entry and for
    // points outside the alphabet alike.
    const Rational& mass(const Point& p) const {
        static const Rational zero(0);
        auto it = mass_.find(p);
        return it == mass_.end() ? zero : it->second;
    }

    // Positive-mass entries, ordered by point.
    const std::map<Point, Rational>& masses() const { return mass_; }

    std::vector<Point> support() const {
        std::vector<Point> out;
        out.reserve(mass_.size());
        for (const auto& [p, m] : mass_) out.push_back(p);
        return out;
    }

    // Structural equality: same alphabet in the same order, same masses.
    // The distributional relation "=d=" is dist_eq below.
    friend bool operator==(const Dist& a, const Dist& b) {
        return a.alphabet_ == b.alphabet_ && a.mass_ == b.mass_;
    }

  private:
    std::vector<Point> alphabet_;
    std::map<Point, Rational> mass_;
};

// The relation "is distributed as" for finite alphabets: alphabets agree
// as sets and every point carries identical exact mass. Mismatched
// alphabets compare unequal rather than raising.
inline bool dist_eq(const Dist& a, const Dist& b) {
    if (a.alphabet().size() != b.alphabet().size()) return false;
    std::set<Point> sa(a.alphabet().begin(), a.alphabet().end());
    for (const Point& p : b.alphabet()) {
        if (!sa.contains(p)) return false;
    }
    return a.masses() == b.masses();
}

// Push-forward of d through a finite map given as an explicit table.
// The table must cover the whole alphabet, not just the support; the
// result alphabet is the image, in first-occurrence order.
inline Dist pushforward(const Dist& d, const std::map<Point, Point>& f) {
    std::vector<Point> image;
    std::set<Point> seen;
    std::map<Point, Rational> mass;
    for (const Point& x : d.alphabet()) {
        auto it = f.find(x);
        if (it == f.end()) {
            throw UndefinedOnSupport("map undefined at alphabet point '" +
                                     x.to_string() + "'");
        }
        if (seen.insert(it->second).second) image.push_back(it->second);
        const Rational& m = d.mass(x);
        if (m != 0) mass[it->second] += m;
    }
    return Dist(std::move(image), std::move(mass));
}

// Push-forward through a callable assumed total on the alphabet.
inline Dist pushforward(const Dist& d, const std::function<Point(const Point&)>& f) {
    std::map<Point, Point> table;
    for (const Point& x : d.alphabet()) table.emplace(x, f(x));
    return pushforward(d, table);
}

// All record points over the given keys and component alphabets, in
// row-major order (first key slowest).
inline std::vector<Point> product_points(
    const std::vector<std::string>& keys,
    const std::map<std::string, std::vector<Point>>& components) {
    std::vector<Point> out;
    std::size_t cells = 1;
    for (const auto& k : keys) cells *= components.at(k).size();
    out.reserve(cells);
    std::vector<Point::Field> current;
    std::function<void(std::size_t)> rec = [&](std::size_t depth) {
        if (depth == keys.size()) {
            out.push_back(Point::record(current));
            return;
        }
        for (const Point& v : components.at(keys[depth])) {
            current.emplace_back(keys[depth], v);
            rec(depth + 1);
            current.pop_back();
        }
    };
    rec(0);
    return out;
}

// A distribution over record points sharing one index set, with the
// component alphabet of every key carried alongside. The point set of
// the underlying Dist may be sparse (e.g. a support product) while the
// per-key alphabets stay complete, so marginals always recover full
// component alphabets.
class JointDist {
  public:
    JointDist(std::vector<std::string> keys,
              std::map<std::string, std::vector<Point>> components, Dist dist)
        : keys_(std::move(keys)), components_(std::move(components)), dist_(std::move(dist)) {
        if (keys_.empty()) throw ValidationError("joint distribution with no keys");
        std::set<std::string> key_set(keys_.begin(), keys_.end());
        if (key_set.size() != keys_.size()) {
            throw ValidationError("duplicate keys in joint distribution");
        }
        if (components_.size() != keys_.size()) {
            throw ValidationError("component alphabets do not match the key set");
        }
        std::map<std::string, std::set<Point>> comp_sets;
        for (const auto& k : keys_) {
            auto it = components_.find(k);
            if (it == components_.end()) {
                throw ValidationError("missing component alphabet for key '" + k + "'");
            }
            comp_sets.emplace(k, std::set<Point>(it->second.begin(), it->second.end()));
        }
        const std::vector<std::string> sorted_keys = keys_sorted();
        for (const Point& p : dist_.alphabet()) {
            if (!p.is_record() || p.keys() != sorted_keys) {
                throw ValidationError("joint point '" + p.to_string() +
                                      "' does not match the index set");
            }
            for (const auto& [k, v] : p.fields()) {
                if (!comp_sets.at(k).contains(v)) {
                    throw ValidationError("component '" + v.to_string() +
                                          "' of key '" + k + "' outside its alphabet");
                }
            }
        }
    }

    // Full-product alphabet in row-major order of `keys` (first key
    // slowest). Cells absent from `mass` carry zero.
    static JointDist dense(std::vector<std::string> keys,
                           std::map<std::string, std::vector<Point>> components,
                           const std::map<Point, Rational>& mass) {
        Dist d(product_points(keys, components), mass);
        return JointDist(std::move(keys), std::move(components), std::move(d));
    }

    // Alphabet restricted to the given weighted points.
    static JointDist sparse(std::vector<std::string> keys,
                            std::map<std::string, std::vector<Point>> components,
                            const std::map<Point, Rational>& mass) {
        std::vector<Point> alphabet;
        alphabet.reserve(mass.size());
        for (const auto& [p, m] : mass) alphabet.push_back(p);
        Dist d(std::move(alphabet), mass);
        return JointDist(std::move(keys), std::move(components), std::move(d));
    }

    const std::vector<std::string>& keys() const { return keys_; }

    const std::vector<Point>& component_alphabet(const std::string& key) const {
        auto it = components_.find(key);
        if (it == components_.end()) throw UnknownKey("no component for key '" + key + "'");
        return it->second;
    }

    const std::map<std::string, std::vector<Point>>& components() const {
        return components_;
    }

    const Dist& dist() const { return dist_; }
    const Rational& mass(const Point& p) const { return dist_.mass(p); }

    friend bool operator==(const JointDist& a, const JointDist& b) {
        return a.keys_ == b.keys_ && a.components_ == b.components_ && a.dist_ == b.dist_;
    }

  private:
    std::vector<std::string> keys_sorted() const {
        std::vector<std::string> s(keys_);
        std::sort(s.begin(), s.end());
        return s;
    }

    std::vector<std::string> keys_;
    std::map<std::string, std::vector<Point>> components_;
    Dist dist_;
};

// Exact marginal onto one key. The result alphabet is the key's full
// component alphabet, so a coupling projects back to each factor
// including its zero-mass points.
inline Dist project(const JointDist& j, const std::string& key) {
    if (std::find(j.keys().begin(), j.keys().end(), key) == j.keys().end()) {
        throw UnknownKey("joint distribution has no key '" + key + "'");
    }
    std::map<Point, Rational> mass;
    for (const auto& [p, m] : j.dist().masses()) mass[p.at(key)] += m;
    return Dist(j.component_alphabet(key), std::move(mass));
}

// Independent (product) coupling of keyed factors: the joint mass of a
// tuple is the product of component masses. The point set is the
// product of the supports; per-key alphabets keep the full factors.
inline JointDist product_coupling(const std::vector<std::pair<std::string, Dist>>& factors) {
    if (factors.empty()) throw EmptyInput("coupling of zero distributions");
    std::vector<std::string> keys;
    std::map<std::string, std::vector<Point>> components;
    for (const auto& [k, d] : factors) {
        keys.push_back(k);
        if (!components.emplace(k, d.alphabet()).second) {
            throw ValidationError("duplicate coupling key '" + k + "'");
        }
    }
    std::map<Point, Rational> mass;
    std::vector<Point::Field> current;
    std::function<void(std::size_t, const Rational&)> rec =
        [&](std::size_t depth, const Rational& acc) {
            if (depth == factors.size()) {
                mass.emplace(Point::record(current), acc);
                return;
            }
            for (const auto& [p, m] : factors[depth].second.masses()) {
                current.emplace_back(factors[depth].first, p);
                rec(depth + 1, acc * m);
                current.pop_back();
            }
        };
    rec(0, Rational(1));
    return JointDist::sparse(std::move(keys), std::move(components), mass);
}

// Quantile (monotone) coupling: each factor's support is laid out along
// [0,1) in point order and tuples are read off the common refinement.
// Couples the factors in lockstep rather than independently; useful as
// a second coupling strategy, since any coupling works.
inline JointDist monotone_coupling(const std::vector<std::pair<std::string, Dist>>& factors) {
    if (factors.empty()) throw EmptyInput("coupling of zero distributions");
    std::vector<std::string> keys;
    std::map<std::string, std::vector<Point>> components;
    struct Walker {
        std::vector<std::pair<Point, Rational>> cells;
        std::size_t idx = 0;
        Rational used = 0;  // mass of cells[idx] already consumed
    };
    std::vector<Walker> walkers;
    for (const auto& [k, d] : factors) {
        keys.push_back(k);
        if (!components.emplace(k, d.alphabet()).second) {
            throw ValidationError("duplicate coupling key '" + k + "'");
        }
        Walker w;
        w.cells.assign(d.masses().begin(), d.masses().end());
        walkers.push_back(std::move(w));
    }

    std::map<Point, Rational> mass;
    Rational consumed = 0;
    while (consumed < 1) {
        Rational step = 1 - consumed;
        for (const Walker& w : walkers) {
            const Rational remaining = w.cells[w.idx].second - w.used;
            if (remaining < step) step = remaining;
        }
        std::vector<Point::Field> tuple;
        tuple.reserve(walkers.size());
        for (std::size_t i = 0; i < walkers.size(); ++i) {
            tuple.emplace_back(keys[i], walkers[i].cells[walkers[i].idx].first);
        }
        mass[Point::record(std::move(tuple))] += step;
        consumed += step;
        for (Walker& w : walkers) {
            w.used += step;
            if (w.used == w.cells[w.idx].second && w.idx + 1 < w.cells.size()) {
                ++w.idx;
                w.used = 0;
            }
        }
    }
    return JointDist::sparse(std::move(keys), std::move(components), mass);
}

// A coupling strategy turns keyed factors into one jointly distributed
// family whose projections recover the factors exactly.
using CouplingStrategy =
    std::function<JointDist(const std::vector<std::pair<std::string, Dist>>&)>;

}  // namespace hvmforge
