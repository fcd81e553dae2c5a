#include "juliadim/gdms.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "juliadim/errors.hpp"

namespace juliadim {

namespace {

std::vector<int> family_sizes(const std::vector<std::vector<RationalMap>>& fams) {
    std::vector<int> out;
    out.reserve(fams.size());
    for (const auto& f : fams) out.push_back(int(f.size()));
    return out;
}

} // namespace

GdmsSystem::GdmsSystem(DirectedGraph graph,
                       std::vector<std::vector<RationalMap>> families)
    : graph_(std::move(graph)),
      families_(std::move(families)),
      shift_(graph_, family_sizes(families_)) {
    from_vertex_.assign(size_t(graph_.vertex_count), {});
    into_vertex_.assign(size_t(graph_.vertex_count), {});
    for (int s = 0; s < shift_.symbol_count(); ++s) {
        from_vertex_[size_t(shift_.initial_vertex(s))].push_back(s);
        into_vertex_[size_t(shift_.terminal_vertex(s))].push_back(s);
    }
    irreducible_ = is_irreducible(shift_.incidence());
    aperiodic_ = irreducible_ ? is_aperiodic(shift_.incidence()) : false;
}

std::vector<const RationalMap*> GdmsSystem::distinct_generators() const {
    std::vector<const RationalMap*> out;
    for (const auto& fam : families_)
        for (const auto& g : fam) {
            bool seen = false;
            for (const RationalMap* h : out)
                if (*h == g) {
                    seen = true;
                    break;
                }
            if (!seen) out.push_back(&g);
        }
    return out;
}

namespace {

using nlohmann::json;

Complex parse_coeff(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw SchemaError("coefficient must be a [re, im] number pair");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

ComplexPolynomial parse_poly(const json& j, const char* what) {
    if (!j.is_array() || j.empty())
        throw SchemaError(std::string(what) + " must be a nonempty coefficient array");
    std::vector<Complex> c;
    c.reserve(j.size());
    for (const auto& item : j) c.push_back(parse_coeff(item));
    return ComplexPolynomial(std::move(c));
}

json poly_to_json(const ComplexPolynomial& p) {
    json out = json::array();
    for (const Complex& c : p.coefficients())
        out.push_back(json::array({c.real(), c.imag()}));
    return out;
}

} // namespace

GdmsSystem load_system(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("edges"))
        throw SchemaError("config must be an object with 'vertices' and 'edges'");
    if (!doc["vertices"].is_number_integer() || doc["vertices"].get<int>() < 1)
        throw SchemaError("'vertices' must be an integer >= 1");

    DirectedGraph g;
    g.vertex_count = doc["vertices"].get<int>();
    std::vector<std::vector<RationalMap>> families;
    if (!doc["edges"].is_array() || doc["edges"].empty())
        throw SchemaError("'edges' must be a nonempty array");
    for (const auto& je : doc["edges"]) {
        if (!je.is_object() || !je.contains("id") || !je.contains("from") ||
            !je.contains("to") || !je.contains("maps"))
            throw SchemaError("each edge needs 'id', 'from', 'to', 'maps'");
        DirectedGraph::Edge e;
        e.id = je["id"].get<std::string>();
        if (!je["from"].is_number_integer() || !je["to"].is_number_integer())
            throw SchemaError("edge endpoints must be integers");
        e.from = je["from"].get<int>() - 1; // configs are 1-based
        e.to = je["to"].get<int>() - 1;
        g.edges.push_back(e);

        if (!je["maps"].is_array())
            throw SchemaError("edge 'maps' must be an array");
        std::vector<RationalMap> fam;
        for (const auto& jm : je["maps"]) {
            if (!jm.is_object() || !jm.contains("num") || !jm.contains("den"))
                throw SchemaError("each map needs 'num' and 'den'");
            try {
                fam.emplace_back(parse_poly(jm["num"], "num"),
                                 parse_poly(jm["den"], "den"));
            } catch (const InvalidMap& e) {
                throw InvalidMap(std::string("edge '") + je["id"].get<std::string>() +
                                 "': " + e.what());
            }
        }
        if (fam.empty())
            throw EmptyFamily("edge '" + e.id + "' has an empty map family");
        families.push_back(std::move(fam));
    }
    g.validate();
    return GdmsSystem(std::move(g), std::move(families));
}

GdmsSystem load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_system(ss.str());
}

std::string save_system(const GdmsSystem& sys) {
    json doc;
    doc["vertices"] = sys.vertex_count();
    doc["edges"] = json::array();
    for (size_t e = 0; e < sys.graph().edges.size(); ++e) {
        const auto& edge = sys.graph().edges[e];
        json je;
        je["id"] = edge.id;
        je["from"] = edge.from + 1;
        je["to"] = edge.to + 1;
        je["maps"] = json::array();
        for (const RationalMap& g : sys.families()[e]) {
            json jm;
            jm["num"] = poly_to_json(g.numerator());
            jm["den"] = poly_to_json(g.denominator());
            je["maps"].push_back(jm);
        }
        doc["edges"].push_back(je);
    }
    return doc.dump(2) + "\n";
}

GdmsSystem example_section3(int n) {
    if (n < 5) throw DomainError("example_section3 requires n >= 5");
    const Complex centers[3] = {Complex(0.0, 0.0), Complex(0.0, 3.0),
                                Complex(3.0, 0.0)};
    DirectedGraph g;
    g.vertex_count = 3;
    std::vector<std::vector<RationalMap>> families;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (i == 0 && j == 1) continue; // the removed edge (1,2)
            DirectedGraph::Edge e;
            e.id = std::to_string(i + 1) + "-" + std::to_string(j + 1);
            e.from = i;
            e.to = j;
            g.edges.push_back(e);
            families.push_back({RationalMap::conjugated_power(
                centers[j], n, centers[j])});
        }
    return GdmsSystem(std::move(g), std::move(families));
}

GdmsSystem single_loop_system(std::vector<RationalMap> maps) {
    DirectedGraph g;
    g.vertex_count = 1;
    g.edges.push_back({"loop", 0, 0});
    std::vector<std::vector<RationalMap>> families;
    families.push_back(std::move(maps));
    return GdmsSystem(std::move(g), std::move(families));
}

SkewPoint make_skew_point(const GdmsSystem& sys, SymbolicWord word,
                          SpherePoint z) {
    if (word.empty()) throw EmptyWord("skew point needs a nonempty word");
    if (!sys.shift().admissible(word, false))
        throw Error("skew point word is not admissible");
    SkewPoint p;
    p.vertex = sys.initial_vertex(word.front());
    p.word = std::move(word);
    p.z = z;
    return p;
}

SkewPoint skew_step(const GdmsSystem& sys, SkewPoint p) {
    if (p.exhausted()) throw EmptyWord("skew_step on an exhausted word");
    const int s = p.word[p.head];
    const RationalMap& g = sys.map_of(s);
    const double dn = g.spherical_derivative(p.z);
    p.derivative *= dn;
    if (dn == 0.0) p.critical_hit = true;
    p.z = g(p.z);
    p.vertex = sys.terminal_vertex(s);
    ++p.head;
    return p;
}

WordMap::WordMap(const GdmsSystem& sys, SymbolicWord word, int degree_cap)
    : sys_(&sys), word_(std::move(word)) {
    if (word_.empty()) throw EmptyWord("word map needs a nonempty word");
    if (!sys.shift().admissible(word_, false))
        throw Error("word map word is not admissible");
    from_ = sys.initial_vertex(word_.front());
    to_ = sys.terminal_vertex(word_.back());

    degree_ = 1;
    bool overflow = false;
    for (int s : word_) {
        const std::uint64_t d = std::uint64_t(sys.map_of(s).degree());
        if (degree_ > std::numeric_limits<std::uint64_t>::max() / d) {
            degree_ = std::numeric_limits<std::uint64_t>::max();
            overflow = true;
            break;
        }
        degree_ *= d;
    }

    if (!overflow && degree_ <= std::uint64_t(degree_cap)) {
        RationalMap acc = sys.map_of(word_.front());
        bool finite = true;
        for (size_t k = 1; k < word_.size() && finite; ++k) {
            acc = compose(sys.map_of(word_[k]), acc, degree_cap);
            finite = std::isfinite(acc.numerator().max_coefficient()) &&
                     std::isfinite(acc.denominator().max_coefficient());
        }
        // coefficient overflow leaves no usable explicit form
        if (finite) explicit_ = std::move(acc);
    }
}

SpherePoint WordMap::eval_sequential(const SpherePoint& z) const {
    SpherePoint p = z;
    for (int s : word_) p = sys_->map_of(s)(p);
    return p;
}

SpherePoint WordMap::operator()(const SpherePoint& z) const {
    // sequential application is as fast as an expanded Horner pass and
    // stays well conditioned where expanded coefficients do not
    return eval_sequential(z);
}

double WordMap::spherical_derivative(const SpherePoint& z) const {
    SpherePoint p = z;
    double acc = 1.0;
    for (int s : word_) {
        const RationalMap& g = sys_->map_of(s);
        acc *= g.spherical_derivative(p);
        p = g(p);
    }
    return acc;
}

Complex WordMap::complex_derivative(Complex z) const {
    SpherePoint p{z};
    Complex acc = 1.0;
    for (int s : word_) {
        if (p.is_inf())
            throw DerivativeSingular("orbit left the finite chart");
        const RationalMap& g = sys_->map_of(s);
        acc *= g.derivative_value(p.value());
        p = g(p);
    }
    return acc;
}

WordMap word_map(const GdmsSystem& sys, SymbolicWord w, int degree_cap) {
    return WordMap(sys, std::move(w), degree_cap);
}

std::vector<WordMap> enumerate_h_class(const GdmsSystem& sys, int from, int to,
                                       int max_len, std::uint64_t cap,
                                       int degree_cap) {
    if (max_len < 1) throw Error("enumerate_h_class needs max_len >= 1");
    std::vector<WordMap> out;
    std::uint64_t seen = 0;
    for (int len = 1; len <= max_len; ++len) {
        sys.shift().for_each_word(
            len, false,
            [&](const SymbolicWord& w) {
                if (sys.initial_vertex(w.front()) != from ||
                    sys.terminal_vertex(w.back()) != to)
                    return;
                if (++seen > cap)
                    throw CountCapExceeded("H-class enumeration exceeds cap", seen);
                out.emplace_back(sys, w, degree_cap);
            },
            cap * 64);
    }
    return out;
}

} // namespace juliadim
