#pragma once

#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "hvmforge/dist.hpp"
#include "hvmforge/errors.hpp"
#include "hvmforge/point.hpp"
#include "hvmforge/rational.hpp"
#include "hvmforge/system.hpp"

namespace hvmforge {

// Response tables are explicit finite maps from hidden points to outcome
// labels: total on the support of the relevant hidden distribution,
// allowed to be partial elsewhere.
using ResponseQC = std::map<std::tuple<std::string, std::string, Point>, std::string>;
using ResponseQ = std::map<std::pair<std::string, Point>, std::string>;

enum class HvmForm { general, ci, fc, nc, xi, rho };

inline const char* form_name(HvmForm f) {
    switch (f) {
        case HvmForm::general: return "general";
        case HvmForm::ci: return "ci";
        case HvmForm::fc: return "fc";
        case HvmForm::nc: return "nc";
        case HvmForm::xi: return "xi";
        case HvmForm::rho: return "rho";
    }
    throw InternalError("unreachable form tag");
}

namespace detail {

inline const std::string& respond_qc(const ResponseQC& table, const std::string& q,
                                     const std::string& c, const Point& lambda) {
    auto it = table.find(std::tuple(q, c, lambda));
    if (it == table.end()) {
        throw ResponseUndefined("no response for property '" + q + "', context '" + c +
                                "', hidden point '" + lambda.to_string() + "'");
    }
    return it->second;
}

inline const std::string& respond_q(const ResponseQ& table, const std::string& q,
                                    const Point& lambda) {
    auto it = table.find(std::pair(q, lambda));
    if (it == table.end()) {
        throw ResponseUndefined("no response for property '" + q + "', hidden point '" +
                                lambda.to_string() + "'");
    }
    return it->second;
}

// Push the hidden masses through the per-property responder and lay the
// result over the context's full outcome-tuple alphabet.
inline JointDist realize_over(
    const Structure& st, const Context& c, const std::map<Point, Rational>& hidden_masses,
    const std::function<const std::string&(const std::string&, const Point&)>& respond) {
    std::map<Point, Rational> mass;
    for (const auto& [lambda, m] : hidden_masses) {
        std::vector<Point::Field> tuple;
        tuple.reserve(c.properties.size());
        for (const std::string& q : c.properties) {
            tuple.emplace_back(q, Point::atom(respond(q, lambda)));
        }
        mass[Point::record(std::move(tuple))] += m;
    }
    std::map<std::string, std::vector<Point>> comps;
    for (const std::string& q : c.properties) comps.emplace(q, st.outcome_points(q));
    return JointDist::dense(c.properties, std::move(comps), mass);
}

inline void check_outcome(const Structure& st, const std::string& q,
                          const std::string& outcome) {
    const Property& p = st.property(q);
    for (const std::string& label : p.alphabet) {
        if (label == outcome) return;
    }
    throw ValidationError("outcome '" + outcome + "' not in the alphabet of '" + q + "'");
}

}  // namespace detail

// Most general form: a separate hidden variable per context, response
// depending on property, context and hidden value.
class GeneralHvm {
  public:
    GeneralHvm(Structure structure, std::map<std::string, Dist> hidden, ResponseQC response)
        : structure_(std::move(structure)), hidden_(std::move(hidden)),
          response_(std::move(response)) {
        for (const auto& [key, outcome] : response_) {
            const auto& [q, c, lambda] = key;
            structure_.context(c);
            detail::check_outcome(structure_, q, outcome);
        }
        for (const Context& c : structure_.contexts()) {
            auto it = hidden_.find(c.id);
            if (it == hidden_.end()) {
                throw ValidationError("context '" + c.id + "' has no hidden distribution");
            }
            for (const auto& [lambda, m] : it->second.masses()) {
                for (const std::string& q : c.properties) {
                    detail::respond_qc(response_, q, c.id, lambda);
                }
            }
        }
        if (hidden_.size() != structure_.contexts().size()) {
            throw ValidationError("hidden distribution given for an undeclared context");
        }
    }

    const Structure& structure() const { return structure_; }
    const Dist& hidden(const std::string& context_id) const {
        auto it = hidden_.find(context_id);
        if (it == hidden_.end()) throw UnknownKey("unknown context '" + context_id + "'");
        return it->second;
    }
    const std::map<std::string, Dist>& hidden() const { return hidden_; }
    const ResponseQC& response() const { return response_; }

    friend bool operator==(const GeneralHvm& a, const GeneralHvm& b) {
        return a.structure_ == b.structure_ && a.hidden_ == b.hidden_ &&
               a.response_ == b.response_;
    }

  private:
    Structure structure_;
    std::map<std::string, Dist> hidden_;
    ResponseQC response_;
};

// Context-independent mapping: one shared hidden alphabet, per-context
// hidden distributions over it, response with no context argument.
class CiHvm {
  public:
    CiHvm(Structure structure, std::vector<Point> hidden_alphabet,
          std::map<std::string, Dist> hidden, ResponseQ response)
        : structure_(std::move(structure)), hidden_alphabet_(std::move(hidden_alphabet)),
          hidden_(std::move(hidden)), response_(std::move(response)) {
        for (const auto& [key, outcome] : response_) {
            detail::check_outcome(structure_, key.first, outcome);
        }
        for (const Context& c : structure_.contexts()) {
            auto it = hidden_.find(c.id);
            if (it == hidden_.end()) {
                throw ValidationError("context '" + c.id + "' has no hidden distribution");
            }
            if (it->second.alphabet() != hidden_alphabet_) {
                throw ValidationError("hidden distribution of context '" + c.id +
                                      "' is not over the shared alphabet");
            }
            for (const auto& [lambda, m] : it->second.masses()) {
                for (const std::string& q : c.properties) {
                    detail::respond_q(response_, q, lambda);
                }
            }
        }
        if (hidden_.size() != structure_.contexts().size()) {
            throw ValidationError("hidden distribution given for an undeclared context");
        }
    }

    const Structure& structure() const { return structure_; }
    const std::vector<Point>& hidden_alphabet() const { return hidden_alphabet_; }
    const Dist& hidden(const std::string& context_id) const {
        auto it = hidden_.find(context_id);
        if (it == hidden_.end()) throw UnknownKey("unknown context '" + context_id + "'");
        return it->second;
    }
    const std::map<std::string, Dist>& hidden() const { return hidden_; }
    const ResponseQ& response() const { return response_; }

    friend bool operator==(const CiHvm& a, const CiHvm& b) {
        return a.structure_ == b.structure_ && a.hidden_alphabet_ == b.hidden_alphabet_ &&
               a.hidden_ == b.hidden_ && a.response_ == b.response_;
    }

  private:
    Structure structure_;
    std::vector<Point> hidden_alphabet_;
    std::map<std::string, Dist> hidden_;
    ResponseQ response_;
};

// Free choice: one hidden variable with one distribution for all
// contexts; response may still depend on the context.
class FcHvm {
  public:
    FcHvm(Structure structure, Dist hidden, ResponseQC response)
        : structure_(std::move(structure)), hidden_(std::move(hidden)),
          response_(std::move(response)) {
        for (const auto& [key, outcome] : response_) {
            const auto& [q, c, lambda] = key;
            structure_.context(c);
            detail::check_outcome(structure_, q, outcome);
        }
        for (const Context& c : structure_.contexts()) {
            for (const auto& [lambda, m] : hidden_.masses()) {
                for (const std::string& q : c.properties) {
                    detail::respond_qc(response_, q, c.id, lambda);
                }
            }
        }
    }

    const Structure& structure() const { return structure_; }
    const Dist& hidden() const { return hidden_; }
    const ResponseQC& response() const { return response_; }

    friend bool operator==(const FcHvm& a, const FcHvm& b) {
        return a.structure_ == b.structure_ && a.hidden_ == b.hidden_ &&
               a.response_ == b.response_;
    }

  private:
    Structure structure_;
    Dist hidden_;
    ResponseQC response_;
};

// Noncontextual form: both assumptions at once. A single hidden variable
// and a response depending on the property alone.
class NcHvm {
  public:
    NcHvm(Structure structure, Dist hidden, ResponseQ response)
        : structure_(std::move(structure)), hidden_(std::move(hidden)),
          response_(std::move(response)) {
        for (const auto& [key, outcome] : response_) {
            detail::check_outcome(structure_, key.first, outcome);
        }
        for (const Property& p : structure_.properties()) {
            for (const auto& [lambda, m] : hidden_.masses()) {
                detail::respond_q(response_, p.id, lambda);
            }
        }
    }

    const Structure& structure() const { return structure_; }
    const Dist& hidden() const { return hidden_; }
    const ResponseQ& response() const { return response_; }

    friend bool operator==(const NcHvm& a, const NcHvm& b) {
        return a.structure_ == b.structure_ && a.hidden_ == b.hidden_ &&
               a.response_ == b.response_;
    }

  private:
    Structure structure_;
    Dist hidden_;
    ResponseQ response_;
};

// Seemingly-more-general form: per (property, context) hidden variables,
// jointly distributed within each context; the response for q reads only
// the q-component.
class XiHvm {
  public:
    XiHvm(Structure structure, std::map<std::string, JointDist> hidden, ResponseQC response)
        : structure_(std::move(structure)), hidden_(std::move(hidden)),
          response_(std::move(response)) {
        for (const auto& [key, outcome] : response_) {
            const auto& [q, c, lambda] = key;
            structure_.context(c);
            detail::check_outcome(structure_, q, outcome);
        }
        for (const Context& c : structure_.contexts()) {
            auto it = hidden_.find(c.id);
            if (it == hidden_.end()) {
                throw ValidationError("context '" + c.id + "' has no hidden joint");
            }
            if (it->second.keys() != c.properties) {
                throw ValidationError("hidden joint of context '" + c.id +
                                      "' is not keyed by its property list");
            }
            for (const auto& [lambda, m] : it->second.dist().masses()) {
                for (const std::string& q : c.properties) {
                    detail::respond_qc(response_, q, c.id, lambda.at(q));
                }
            }
        }
        if (hidden_.size() != structure_.contexts().size()) {
            throw ValidationError("hidden joint given for an undeclared context");
        }
    }

    const Structure& structure() const { return structure_; }
    const JointDist& hidden(const std::string& context_id) const {
        auto it = hidden_.find(context_id);
        if (it == hidden_.end()) throw UnknownKey("unknown context '" + context_id + "'");
        return it->second;
    }
    const std::map<std::string, JointDist>& hidden() const { return hidden_; }
    const ResponseQC& response() const { return response_; }

    friend bool operator==(const XiHvm& a, const XiHvm& b) {
        return a.structure_ == b.structure_ && a.hidden_ == b.hidden_ &&
               a.response_ == b.response_;
    }

  private:
    Structure structure_;
    std::map<std::string, JointDist> hidden_;
    ResponseQC response_;
};

// Per-property hidden variables with one joint distribution over all of
// them; context blind on both sides.
class RhoHvm {
  public:
    RhoHvm(Structure structure, JointDist hidden, ResponseQ response)
        : structure_(std::move(structure)), hidden_(std::move(hidden)),
          response_(std::move(response)) {
        for (const auto& [key, outcome] : response_) {
            detail::check_outcome(structure_, key.first, outcome);
        }
        std::vector<std::string> property_ids;
        for (const Property& p : structure_.properties()) property_ids.push_back(p.id);
        if (hidden_.keys() != property_ids) {
            throw ValidationError("hidden joint is not keyed by the property list");
        }
        for (const auto& [lambda, m] : hidden_.dist().masses()) {
            for (const Property& p : structure_.properties()) {
                detail::respond_q(response_, p.id, lambda.at(p.id));
            }
        }
    }

    const Structure& structure() const { return structure_; }
    const JointDist& hidden() const { return hidden_; }
    const ResponseQ& response() const { return response_; }

    friend bool operator==(const RhoHvm& a, const RhoHvm& b) {
        return a.structure_ == b.structure_ && a.hidden_ == b.hidden_ &&
               a.response_ == b.response_;
    }

  private:
    Structure structure_;
    JointDist hidden_;
    ResponseQ response_;
};

// ---------------------------------------------------------------------
// realize: the joint outcome distribution an HVM induces in one context.

inline JointDist realize(const GeneralHvm& m, const std::string& context_id) {
    const Context& c = m.structure().context(context_id);
    return detail::realize_over(
        m.structure(), c, m.hidden(context_id).masses(),
        [&](const std::string& q, const Point& lambda) -> const std::string& {
            return detail::respond_qc(m.response(), q, c.id, lambda);
        });
}

inline JointDist realize(const CiHvm& m, const std::string& context_id) {
    const Context& c = m.structure().context(context_id);
    return detail::realize_over(
        m.structure(), c, m.hidden(context_id).masses(),
        [&](const std::string& q, const Point& lambda) -> const std::string& {
            return detail::respond_q(m.response(), q, lambda);
        });
}

inline JointDist realize(const FcHvm& m, const std::string& context_id) {
    const Context& c = m.structure().context(context_id);
    return detail::realize_over(
        m.structure(), c, m.hidden().masses(),
        [&](const std::string& q, const Point& lambda) -> const std::string& {
            return detail::respond_qc(m.response(), q, c.id, lambda);
        });
}

inline JointDist realize(const NcHvm& m, const std::string& context_id) {
    const Context& c = m.structure().context(context_id);
    return detail::realize_over(
        m.structure(), c, m.hidden().masses(),
        [&](const std::string& q, const Point& lambda) -> const std::string& {
            return detail::respond_q(m.response(), q, lambda);
        });
}

inline JointDist realize(const XiHvm& m, const std::string& context_id) {
    const Context& c = m.structure().context(context_id);
    return detail::realize_over(
        m.structure(), c, m.hidden(context_id).dist().masses(),
        [&](const std::string& q, const Point& lambda) -> const std::string& {
            return detail::respond_qc(m.response(), q, c.id, lambda.at(q));
        });
}

inline JointDist realize(const RhoHvm& m, const std::string& context_id) {
    const Context& c = m.structure().context(context_id);
    return detail::realize_over(
        m.structure(), c, m.hidden().dist().masses(),
        [&](const std::string& q, const Point& lambda) -> const std::string& {
            return detail::respond_q(m.response(), q, lambda.at(q));
        });
}

// Tagged union of the six forms, for serialization and the CLI.
using Hvm = std::variant<GeneralHvm, CiHvm, FcHvm, NcHvm, XiHvm, RhoHvm>;

inline HvmForm form_of(const Hvm& m) {
    return std::visit(
        [](const auto& v) -> HvmForm {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, GeneralHvm>) return HvmForm::general;
            else if constexpr (std::is_same_v<T, CiHvm>) return HvmForm::ci;
            else if constexpr (std::is_same_v<T, FcHvm>) return HvmForm::fc;
            else if constexpr (std::is_same_v<T, NcHvm>) return HvmForm::nc;
            else if constexpr (std::is_same_v<T, XiHvm>) return HvmForm::xi;
            else return HvmForm::rho;
        },
        m);
}

inline const Structure& structure_of(const Hvm& m) {
    return std::visit([](const auto& v) -> const Structure& { return v.structure(); }, m);
}

inline JointDist realize(const Hvm& m, const std::string& context_id) {
    return std::visit([&](const auto& v) { return realize(v, context_id); }, m);
}

// True iff the model reproduces every context's joint distribution
// exactly. Structures must agree up to declaration order.
template <typename M>
inline bool models(const M& m, const System& s) {
    if (!m.structure().congruent(s.structure())) {
        throw StructureMismatch("model and system structures differ");
    }
    for (const Context& c : s.structure().contexts()) {
        if (!dist_eq(realize(m, c.id).dist(), s.context_dist(c.id).dist())) return false;
    }
    return true;
}

inline bool models(const Hvm& m, const System& s) {
    return std::visit([&](const auto& v) { return models(v, s); }, m);
}

// The system an HVM induces: realize in every context.
template <typename M>
inline System realized_system(const M& m) {
    std::map<std::string, JointDist> jointly;
    for (const Context& c : m.structure().contexts()) {
        jointly.emplace(c.id, realize(m, c.id));
    }
    return System(m.structure(), std::move(jointly));
}

inline System realized_system(const Hvm& m) {
    return std::visit([](const auto& v) { return realized_system(v); }, m);
}

}  // namespace hvmforge
