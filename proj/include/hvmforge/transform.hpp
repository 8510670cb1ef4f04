#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hvmforge/dist.hpp"
#include "hvmforge/errors.hpp"
#include "hvmforge/hvm.hpp"
#include "hvmforge/point.hpp"
#include "hvmforge/system.hpp"

namespace hvmforge {

namespace detail {

// Couple the per-context hidden distributions and check the defining
// coupling property, so a faulty strategy is rejected instead of
// silently producing a model that realizes something else.
inline JointDist couple_contexts(const Structure& st,
                                 const std::map<std::string, Dist>& per_context,
                                 const CouplingStrategy& strategy) {
    std::vector<std::pair<std::string, Dist>> factors;
    factors.reserve(st.contexts().size());
    for (const Context& c : st.contexts()) factors.emplace_back(c.id, per_context.at(c.id));
    JointDist coupling = strategy(factors);
    for (const auto& [key, factor] : factors) {
        if (!dist_eq(project(coupling, key), factor)) {
            throw ValidationError("coupling strategy output does not project onto '" + key +
                                  "'");
        }
    }
    return coupling;
}

}  // namespace detail

// CI form to free-choice form: couple the per-context hidden variables
// into a single one and read the context's component back out, i.e.
// gamma(q, c, lambda) = beta(q, lambda[c]).
inline FcHvm ci_to_fc(const CiHvm& m, const CouplingStrategy& strategy = product_coupling) {
    JointDist coupling = detail::couple_contexts(m.structure(), m.hidden(), strategy);
    ResponseQC gamma;
    for (const auto& [lambda, mass] : coupling.dist().masses()) {
        for (const Context& c : m.structure().contexts()) {
            const Point& component = lambda.at(c.id);
            for (const std::string& q : c.properties) {
                gamma[std::tuple(q, c.id, lambda)] =
                    detail::respond_q(m.response(), q, component);
            }
        }
    }
    return FcHvm(m.structure(), coupling.dist(), std::move(gamma));
}

// Free-choice form to CI form: bundle the outcomes of each context into
// a per-context hidden variable. The shared hidden alphabet is the set
// of partial outcome assignments; beta reads the property's component.
inline CiHvm fc_to_ci(const FcHvm& m) {
    std::map<std::string, std::map<Point, Rational>> per_context_mass;
    std::set<Point> assignments;
    for (const Context& c : m.structure().contexts()) {
        auto& mass = per_context_mass[c.id];
        for (const auto& [lambda, w] : m.hidden().masses()) {
            std::vector<Point::Field> fields;
            fields.reserve(c.properties.size());
            for (const std::string& q : c.properties) {
                fields.emplace_back(
                    q, Point::atom(detail::respond_qc(m.response(), q, c.id, lambda)));
            }
            Point assignment = Point::record(std::move(fields));
            assignments.insert(assignment);
            mass[std::move(assignment)] += w;
        }
    }
    std::vector<Point> alphabet(assignments.begin(), assignments.end());
    std::map<std::string, Dist> hidden;
    for (auto& [cid, mass] : per_context_mass) {
        hidden.emplace(cid, Dist(alphabet, std::move(mass)));
    }
    ResponseQ beta;
    for (const Point& a : alphabet) {
        for (const auto& [q, outcome] : a.fields()) {
            beta[std::pair(q, a)] = outcome.label();
        }
    }
    return CiHvm(m.structure(), std::move(alphabet), std::move(hidden), std::move(beta));
}

// General form to free-choice form: same coupling construction as
// ci_to_fc, with the context argument of the response retained.
inline FcHvm general_to_fc(const GeneralHvm& m,
                           const CouplingStrategy& strategy = product_coupling) {
    JointDist coupling = detail::couple_contexts(m.structure(), m.hidden(), strategy);
    ResponseQC gamma;
    for (const auto& [lambda, mass] : coupling.dist().masses()) {
        for (const Context& c : m.structure().contexts()) {
            const Point& component = lambda.at(c.id);
            for (const std::string& q : c.properties) {
                gamma[std::tuple(q, c.id, lambda)] =
                    detail::respond_qc(m.response(), q, c.id, component);
            }
        }
    }
    return FcHvm(m.structure(), coupling.dist(), std::move(gamma));
}

// Free-choice form is already a general form: use the same hidden
// distribution in every context.
inline GeneralHvm fc_to_general(const FcHvm& m) {
    std::map<std::string, Dist> hidden;
    for (const Context& c : m.structure().contexts()) hidden.emplace(c.id, m.hidden());
    return GeneralHvm(m.structure(), std::move(hidden), m.response());
}

// Per-(property, context) hidden variables to the general form: the
// per-context joint becomes the hidden variable, and the response picks
// out the property's component before applying xi.
inline GeneralHvm xi_to_general(const XiHvm& m) {
    std::map<std::string, Dist> hidden;
    ResponseQC alpha;
    for (const Context& c : m.structure().contexts()) {
        const Dist& joint = m.hidden(c.id).dist();
        std::map<Point, Rational> mass(joint.masses());
        std::vector<Point> support;
        support.reserve(mass.size());
        for (const auto& [p, w] : mass) support.push_back(p);
        for (const Point& lambda : support) {
            for (const std::string& q : c.properties) {
                alpha[std::tuple(q, c.id, lambda)] =
                    detail::respond_qc(m.response(), q, c.id, lambda.at(q));
            }
        }
        hidden.emplace(c.id, Dist(std::move(support), std::move(mass)));
    }
    return GeneralHvm(m.structure(), std::move(hidden), std::move(alpha));
}

// Per-property hidden variables to the noncontextual form: the joint of
// all per-property variables becomes the single hidden variable, and
// delta(q, lambda) = rho(q, lambda[q]).
inline NcHvm rho_to_nc(const RhoHvm& m) {
    const Dist& joint = m.hidden().dist();
    std::map<Point, Rational> mass(joint.masses());
    std::vector<Point> support;
    support.reserve(mass.size());
    for (const auto& [p, w] : mass) support.push_back(p);
    ResponseQ delta;
    for (const Point& lambda : support) {
        for (const Property& p : m.structure().properties()) {
            delta[std::pair(p.id, lambda)] =
                detail::respond_q(m.response(), p.id, lambda.at(p.id));
        }
    }
    return NcHvm(m.structure(), Dist(std::move(support), std::move(mass)),
                 std::move(delta));
}

// ---------------------------------------------------------------------
// Embeddings of the noncontextual form into the three weaker forms.
// Content-preserving: added arguments are ignored, distributions copied.

inline FcHvm nc_to_fc(const NcHvm& m) {
    ResponseQC gamma;
    for (const auto& [key, outcome] : m.response()) {
        const auto& [q, lambda] = key;
        for (const std::string& cid : m.structure().contexts_of(q)) {
            gamma[std::tuple(q, cid, lambda)] = outcome;
        }
    }
    return FcHvm(m.structure(), m.hidden(), std::move(gamma));
}

inline CiHvm nc_to_ci(const NcHvm& m) {
    std::map<std::string, Dist> hidden;
    for (const Context& c : m.structure().contexts()) hidden.emplace(c.id, m.hidden());
    return CiHvm(m.structure(), m.hidden().alphabet(), std::move(hidden), m.response());
}

inline GeneralHvm nc_to_general(const NcHvm& m) {
    FcHvm fc = nc_to_fc(m);
    return fc_to_general(fc);
}

inline Hvm embed_nc(const NcHvm& m, HvmForm target) {
    switch (target) {
        case HvmForm::fc: return nc_to_fc(m);
        case HvmForm::ci: return nc_to_ci(m);
        case HvmForm::general: return nc_to_general(m);
        default:
            throw ValidationError(std::string("cannot embed the nc form into '") +
                                  form_name(target) + "'");
    }
}

}  // namespace hvmforge
