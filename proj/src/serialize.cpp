#include <tmf/serialize.hpp>

#include <sstream>

namespace tmf {

PolytopeSpec polytope_from_json(const Json& j) {
    PolytopeSpec spec;
    if (!j.contains("dim") || !j.contains("facets"))
        throw std::invalid_argument("polytope file needs \"dim\" and \"facets\"");
    spec.n = j.at("dim").get<int>();
    for (const auto& f : j.at("facets")) {
        Facet facet;
        for (const auto& x : f.at("normal")) facet.normal.push_back(x.get<long>());
        const auto& off = f.at("offset");
        facet.offset = off.is_string() ? rat_parse(off.get<std::string>())
                                       : Rat(off.get<long>());
        spec.facets.push_back(std::move(facet));
    }
    return spec;
}

Json polytope_to_json(const PolytopeSpec& spec) {
    Json j;
    j["dim"] = spec.n;
    j["facets"] = Json::array();
    for (const auto& f : spec.facets)
        j["facets"].push_back({{"normal", f.normal}, {"offset", rat_str(f.offset)}});
    return j;
}

Json series_to_json(const NovikovSeries& s) {
    Json j;
    j["text"] = s.str();
    j["terms"] = Json::array();
    for (const auto& [k, q] : s.terms()) {
        Rat t(k.t_num, s.denom());
        t.canonicalize();
        j["terms"].push_back({{"q", rat_str(q)}, {"s", k.s_exp}, {"T", rat_str(t)}});
    }
    return j;
}

NovikovSeries series_from_json(const Json& j, int32_t denom, int64_t cutoff_num) {
    if (j.is_string()) return series_parse(j.get<std::string>(), denom, cutoff_num);
    NovikovSeries s(denom, cutoff_num);
    const Json& terms = j.contains("terms") ? j.at("terms") : j;
    for (const auto& t : terms) {
        Rat q = rat_parse(t.at("q").get<std::string>());
        int32_t se = t.value("s", 0);
        Rat te = t.contains("T")
                     ? (t.at("T").is_string() ? rat_parse(t.at("T").get<std::string>())
                                              : Rat(t.at("T").get<long>()))
                     : Rat(0);
        Rat tn = te * denom;
        if (!rat_is_int(tn)) throw std::invalid_argument("T exponent outside the value group");
        s.add_term({se, rat_long(tn)}, q);
    }
    return s;
}

Json laurent_to_json(const LaurentElement& x) {
    Json j;
    j["text"] = x.str();
    return j;
}

std::string basis_label(uint32_t mask) {
    if (mask == 0) return "1";
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i < 32; ++i)
        if (mask & (1u << i)) {
            if (!first) os << "*";
            os << "e" << i;
            first = false;
        }
    return os.str();
}

Json endmorphism_to_json(const EndMorphism& m) {
    Json j;
    j["rank"] = m.rank();
    j["basis"] = Json::array();
    for (int i = 0; i < m.rank(); ++i) j["basis"].push_back(basis_label(m.module()->basis[i]));
    j["entries"] = Json::array();
    for (int r = 0; r < m.rank(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.rank(); ++c) row.push_back(m.at(r, c).str());
        j["entries"].push_back(std::move(row));
    }
    auto deg = m.degree();
    if (deg) j["degree"] = *deg;
    return j;
}

Json invariants_to_json(const std::vector<Invariant>& table) {
    Json j = Json::array();
    for (const auto& inv : table)
        j.push_back({{"d", rat_str(inv.d)}, {"k", inv.k}, {"N", rat_str(inv.value)}});
    return j;
}

Chain chain_from_json(const Json& j, const DiracPtr& mod) {
    const ModelPtr& model = mod->model;
    Chain chain;
    const Json& words = j.contains("words") ? j.at("words") : j;
    for (const auto& wj : words) {
        TensorWord w;
        w.scalar = wj.contains("scalar")
                       ? series_from_json(wj.at("scalar"), model->denom)
                       : NovikovSeries::constant(Rat(1), model->denom);
        for (const auto& fj : wj.at("factors")) {
            if (fj.is_string()) {
                const std::string name = fj.get<std::string>();
                if (name == "id") {
                    w.factors.push_back(EndMorphism::identity(mod));
                } else if (name == "h0") {
                    w.factors.push_back(h0_morphism(mod));
                } else if (name == "D") {
                    w.factors.push_back(mod->d_op);
                } else {
                    throw std::invalid_argument("unknown generator name: " + name);
                }
                continue;
            }
            CliffordElement elem(model);
            for (const auto& tj : fj.at("terms")) {
                NovikovSeries coeff = series_from_json(tj.at("coeff"), model->denom);
                ZExp z;
                if (tj.contains("z")) {
                    const auto& zz = tj.at("z");
                    if (static_cast<int>(zz.size()) != model->n)
                        throw std::invalid_argument("z exponent vector has wrong length");
                    for (int i = 0; i < model->n; ++i)
                        z[i] = static_cast<int16_t>(zz[i].get<int>());
                }
                uint32_t mask = 0;
                if (tj.contains("e"))
                    for (const auto& e : tj.at("e")) {
                        int idx = e.get<int>();
                        if (idx < 0 || idx >= model->d)
                            throw std::invalid_argument("unknown generator index e" +
                                                        std::to_string(idx));
                        mask |= 1u << idx;
                    }
                elem.add_term(mask, LaurentElement::monomial(model, z, coeff));
            }
            w.factors.push_back(left_mult(mod, elem));
        }
        chain.words.push_back(std::move(w));
    }
    return chain;
}

Json chain_to_json(const Chain& c) {
    Json j;
    j["words"] = Json::array();
    for (const auto& w : c.words) {
        Json wj;
        wj["scalar"] = w.scalar.str();
        wj["factors"] = Json::array();
        for (const auto& f : w.factors) wj["factors"].push_back(endmorphism_to_json(f));
        j["words"].push_back(std::move(wj));
    }
    return j;
}

Json polytope_report(const ValidatedPolytope& vp) {
    Json j;
    j["delzant"] = true;
    j["dim"] = vp.spec.n;
    j["facets"] = vp.spec.d();
    j["vertices"] = Json::array();
    for (const auto& v : vp.vertices) {
        Json vj = Json::array();
        for (const auto& x : v) vj.push_back(rat_str(x));
        j["vertices"].push_back(std::move(vj));
    }
    KernelLattice kl = kernel_lattice(vp);
    j["J_basis"] = kl.basis;
    j["g_J"] = kl.g_basis;
    Json hb = Json::array();
    for (const auto& h : kl.h_basis) hb.push_back(rat_str(h));
    j["h_J"] = std::move(hb);
    j["value_denominator"] = kl.value_denominator;
    SpinData sd = spin_analysis(kl, vp.spec.d() == 2 && vp.spec.n == 1);
    j["orientable"] = sd.orientable;
    j["comb_rel_pin"] = sd.pin;
    j["spin"] = sd.spin;
    j["sigma"] = sd.sigma_basis;
    j["sigma_prime_free"] = sd.sigma_prime_free;
    if (sd.spin) {
        SpinStructure st = spin_structures(sd, kl);
        j["spin_structure"] = st.s_basis;
        j["spin_structure_orbit"] = st.orbit_size;
    }
    return j;
}

}  // namespace tmf
