#include "typek/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "typek/errors.hpp"

namespace typek::io {

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void escape(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

// Arrays of scalars stay on one line; everything else is indented by two.
bool flat(const Json& j) {
    if (!j.is_array()) return false;
    for (const auto& e : j)
        if (e.is_structured()) return false;
    return true;
}

void emit(std::string& out, const Json& j, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
    const std::string inner(static_cast<std::size_t>(2 * depth + 2), ' ');
    switch (j.type()) {
        case Json::value_t::null: out += "null"; break;
        case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
        case Json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); break;
        case Json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); break;
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? fmt_real(v) : "null";
            break;
        }
        case Json::value_t::string: escape(out, j.get_ref<const std::string&>()); break;
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                break;
            }
            if (flat(j)) {
                out += '[';
                bool first = true;
                for (const auto& e : j) {
                    if (!first) out += ", ";
                    first = false;
                    emit(out, e, depth + 1);
                }
                out += ']';
                break;
            }
            out += "[\n";
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += ",\n";
                first = false;
                out += inner;
                emit(out, e, depth + 1);
            }
            out += '\n' + pad + ']';
            break;
        }
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                break;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += inner;
                escape(out, it.key());
                out += ": ";
                emit(out, it.value(), depth + 1);
            }
            out += '\n' + pad + '}';
            break;
        }
        default: out += "null";
    }
}

}  // namespace

std::string dump(const Json& j) {
    std::string out;
    emit(out, j, 0);
    out += '\n';
    return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp);
            throw Error("write to '" + tmp.string() + "' failed");
        }
    }
    std::filesystem::rename(tmp, target);
}

Json to_json(const Vec& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

namespace {

Json opt_vec(const std::optional<Vec>& v) { return v ? to_json(*v) : Json(nullptr); }

Json points_json(const std::vector<Vec>& pts) {
    Json a = Json::array();
    for (const Vec& p : pts) a.push_back(to_json(p));
    return a;
}

Json eigen_json(const std::array<std::complex<double>, 2>& ev) {
    Json a = Json::array();
    for (const auto& z : ev) a.push_back(Json{{"re", z.real()}, {"im", z.imag()}});
    return a;
}

}  // namespace

Json map_info(const KolmogorovMap& map) {
    Json params = Json::object();
    for (const auto& [k, v] : map.params()) params[k] = v;
    Json warnings = Json::array();
    for (const auto& w : map.warnings()) warnings.push_back(w);
    return Json{{"name", map.name()},
                {"dim", map.dim()},
                {"split_k", map.split().k()},
                {"r", to_json(map.r())},
                {"params", params},
                {"warnings", warnings}};
}

Json to_json(const HypothesisReport& r) {
    Json params = Json::object();
    for (const auto& [k, v] : r.params) params[k] = v;
    Json warnings = Json::array();
    for (const auto& w : r.warnings) warnings.push_back(w);

    Json j;
    j["map"] = Json{{"name", r.map_name}, {"params", params}, {"r", r.r}};
    j["warnings"] = warnings;
    j["all_pass"] = r.all_pass();
    j["a1"] = Json{{"pass", r.a1.pass},
                   {"points", r.a1.points},
                   {"witness", opt_vec(r.a1.witness)},
                   {"entry", r.a1.witness ? Json{r.a1.row + 1, r.a1.col + 1} : Json(nullptr)},
                   {"value", r.a1.witness ? Json(r.a1.value) : Json(nullptr)},
                   {"strict_cross", r.a1.strict_cross}};
    j["a2"] = Json{{"pass", r.a2.pass}, {"f0", to_json(r.a2.f0)}};
    j["invariance"] = Json{{"pass", r.invariance.pass},
                           {"points", r.invariance.points},
                           {"max_ratio", r.invariance.max_ratio},
                           {"argmax", to_json(r.invariance.argmax)},
                           {"witness", opt_vec(r.invariance.witness)}};
    j["dissipative"] = Json{{"pass", r.dissipative.pass},
                            {"t_grid", r.dissipative.t_grid},
                            {"s_res", r.dissipative.s_res},
                            {"worst_margin", r.dissipative.worst_margin},
                            {"worst_t", r.dissipative.worst_t},
                            {"worst_component", r.dissipative.worst_component + 1},
                            {"worst_point", to_json(r.dissipative.worst_point)},
                            {"witness", opt_vec(r.dissipative.witness)}};
    j["rho"] = Json{{"pass", r.rho.pass},
                    {"points", r.rho.points},
                    {"max_rho", r.rho.max_rho},
                    {"argmax", to_json(r.rho.argmax)},
                    {"max_norm_inf", r.rho.max_norm_inf},
                    {"witness", opt_vec(r.rho.witness)}};
    if (r.criterion12) {
        const auto& c = *r.criterion12;
        j["criterion12"] = Json{{"pass", c.pass},
                                {"agrees_with_rho", c.agrees},
                                {"compared", c.compared},
                                {"disagreements", points_json(c.disagreements)},
                                {"side_condition_violations", points_json(c.side_violations)},
                                {"witness", opt_vec(c.witness)}};
    } else {
        j["criterion12"] = nullptr;
    }
    j["norm_bound"] = r.norm_bound ? Json(*r.norm_bound) : Json(nullptr);
    j["grid_spec"] = Json{{"grid_res", r.grid_res},
                          {"t_grid", r.dissipative.t_grid},
                          {"s_res", r.dissipative.s_res}};
    return j;
}

Json to_json(const FixedPointRecord& r) {
    return Json{{"kind", to_string(r.kind)},
                {"location", to_json(r.location)},
                {"residual", r.residual},
                {"eigenvalues", eigen_json(r.eigenvalues)},
                {"class", to_string(r.stability)},
                {"margin", r.margin},
                {"unstable_direction", opt_vec(r.unstable_direction)},
                {"coarse", r.coarse}};
}

Json fixed_points_json(const KolmogorovMap& map, const std::vector<FixedPointRecord>& fps) {
    Json a = Json::array();
    for (const auto& f : fps) a.push_back(to_json(f));
    return Json{{"map", map_info(map)}, {"fixed_points", a}};
}

std::string fixed_points_csv(const std::vector<FixedPointRecord>& fps) {
    std::string out = "kind,x1,x2,residual,lambda1_re,lambda1_im,lambda2_re,lambda2_im,class\n";
    for (const auto& f : fps) {
        out += std::string(to_string(f.kind)) + ',' + fmt_real(f.location[0]) + ',' + fmt_real(f.location[1]) + ',' +
               fmt_real(f.residual) + ',' + fmt_real(f.eigenvalues[0].real()) + ',' +
               fmt_real(f.eigenvalues[0].imag()) + ',' + fmt_real(f.eigenvalues[1].real()) + ',' +
               fmt_real(f.eigenvalues[1].imag()) + ',' + to_string(f.stability) + '\n';
    }
    return out;
}

namespace {

struct Marker {
    std::string name;
    const FixedPointRecord* fp;
};

// Q1, Q2, then interior points: p0 (lowest), p1 (highest), p2, p3, ... in between.
std::vector<Marker> markers(const AttractorDecomposition& d) {
    std::vector<Marker> m;
    std::vector<const FixedPointRecord*> interior;
    for (const auto& f : d.fixed_points) {
        if (f.kind == FixedPointKind::origin) m.push_back({"O", &f});
        if (f.kind == FixedPointKind::axial1) m.push_back({"Q1", &f});
        if (f.kind == FixedPointKind::axial2) m.push_back({"Q2", &f});
        if (f.kind == FixedPointKind::interior) interior.push_back(&f);
    }
    if (!interior.empty()) m.push_back({"p0", interior.front()});
    if (interior.size() > 1) m.push_back({"p1", interior.back()});
    for (std::size_t i = 1; i + 1 < interior.size(); ++i) m.push_back({"p" + std::to_string(i + 1), interior[i]});
    return m;
}

Json nearest_marker(const std::vector<Marker>& ms, const Vec& p) {
    for (const auto& m : ms)
        if (dist_inf(m.fp->location, p) <= 1e-5) return m.name;
    return nullptr;
}

struct Curve {
    std::string name;
    std::string from;
    const std::vector<Vec>* points;
};

std::vector<Curve> curves(const AttractorDecomposition& d) {
    std::vector<Curve> c{{"sigma_H", "Q1", &d.sigma_h.points}};
    if (!d.sigma0_is_point()) c.push_back({"sigma_0", "p0", &d.sigma_0.points});
    c.push_back({"sigma_V", "Q2", &d.sigma_v.points});
    return c;
}

}  // namespace

Json to_json(const KolmogorovMap& map, const AttractorDecomposition& d) {
    const auto ms = markers(d);
    Json jm = Json::array();
    for (const auto& m : ms)
        jm.push_back(Json{{"name", m.name}, {"point", to_json(m.fp->location)}, {"class", to_string(m.fp->stability)}});
    Json jc = Json::array();
    for (const auto& c : curves(d)) {
        jc.push_back(Json{{"name", c.name},
                          {"from", c.from},
                          {"to", nearest_marker(ms, c.points->back())},
                          {"points", points_json(*c.points)}});
    }
    Json mono = Json::array();
    for (const auto& f : d.monotone_flags)
        mono.push_back(Json{{"curve", f.curve}, {"required", f.required}, {"holds", f.holds}, {"pairs", f.pairs}});
    Json unord = Json::array();
    for (const auto& f : d.unordered_flags)
        unord.push_back(Json{{"curves", f.curves}, {"holds", f.holds}, {"pairs", f.pairs}});
    Json nc = Json::array();
    for (const auto& n : d.nullclines)
        nc.push_back(Json{{"name", "l" + std::to_string(n.which)}, {"points", points_json(n.samples)}});
    Json fps = Json::array();
    for (const auto& f : d.fixed_points) fps.push_back(to_json(f));

    return Json{{"map", map_info(map)},
                {"fixed_points", fps},
                {"markers", jm},
                {"curves", jc},
                {"sigma_0_is_point", d.sigma0_is_point()},
                {"sigma_0_max_width", d.sigma_0.max_width},
                {"terminals",
                 Json{{"sigma_H", to_json(d.sigma_h.terminal)}, {"sigma_V", to_json(d.sigma_v.terminal)}}},
                {"arc_resolution", d.sigma_h.arc_resolution},
                {"strict_cross", d.strict_cross},
                {"monotone_flags", mono},
                {"unordered_flags", unord},
                {"nullclines", nc}};
}

namespace {

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

std::string attractor_svg(const KolmogorovMap& map, const AttractorDecomposition& d) {
    constexpr double size = 480.0, margin = 50.0;
    const double r1 = map.r()[0], r2 = map.r()[1];
    auto sx = [&](double x) { return margin + size * x / r1; };
    auto sy = [&](double y) { return margin + size * (1.0 - y / r2); };
    auto polyline = [&](const std::vector<Vec>& pts) {
        std::string s;
        for (const Vec& p : pts) s += (s.empty() ? "" : " ") + px(sx(p[0])) + ',' + px(sy(p[1]));
        return s;
    };

    std::ostringstream o;
    const double total = size + 2 * margin;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(total) << "\" height=\"" << px(total)
      << "\" viewBox=\"0 0 " << px(total) << ' ' << px(total) << "\">\n";
    o << "<rect x=\"0\" y=\"0\" width=\"" << px(total) << "\" height=\"" << px(total) << "\" fill=\"white\"/>\n";
    o << "<g id=\"axes\" stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    o << "<rect x=\"" << px(margin) << "\" y=\"" << px(margin) << "\" width=\"" << px(size) << "\" height=\""
      << px(size) << "\"/>\n</g>\n";
    o << "<g id=\"labels\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<text x=\"" << px(margin + size) << "\" y=\"" << px(margin + size + 20) << "\" text-anchor=\"end\">x1 (r1 = "
      << fmt_real(r1) << ")</text>\n";
    o << "<text x=\"" << px(margin - 10) << "\" y=\"" << px(margin - 10) << "\">x2 (r2 = " << fmt_real(r2)
      << ")</text>\n</g>\n";

    o << "<g id=\"nullclines\" stroke=\"gray\" stroke-width=\"1\" stroke-dasharray=\"6,4\" fill=\"none\">\n";
    for (const auto& n : d.nullclines) {
        if (n.samples.size() < 2) continue;
        o << "<polyline class=\"nullcline\" id=\"l" << n.which << "\" points=\"" << polyline(n.samples) << "\"/>\n";
    }
    o << "</g>\n";

    o << "<g id=\"sigma\" stroke=\"black\" stroke-width=\"2\" fill=\"none\">\n";
    for (const auto& c : curves(d))
        o << "<polyline class=\"sigma\" id=\"" << c.name << "\" points=\"" << polyline(*c.points) << "\"/>\n";
    o << "</g>\n";

    o << "<g id=\"markers\" font-family=\"sans-serif\" font-size=\"13\">\n";
    for (const auto& m : markers(d)) {
        const Vec& p = m.fp->location;
        const char* fill = m.fp->stability == Stability::attractor ? "black" : "white";
        o << "<circle class=\"marker\" id=\"" << m.name << "\" cx=\"" << px(sx(p[0])) << "\" cy=\"" << px(sy(p[1]))
          << "\" r=\"4\" stroke=\"black\" fill=\"" << fill << "\"/>\n";
        o << "<text x=\"" << px(sx(p[0]) + 6) << "\" y=\"" << px(sy(p[1]) - 6) << "\">" << m.name << "</text>\n";
    }
    o << "</g>\n</svg>\n";
    return o.str();
}

std::string orbit_csv(const OrbitTrace& t) {
    std::string out = "step";
    const std::size_t n = t.points.empty() ? 0 : t.points.front().size();
    for (std::size_t i = 0; i < n; ++i) out += ",x" + std::to_string(i + 1);
    out += ",tag\n";
    for (std::size_t m = 0; m < t.points.size(); ++m) {
        out += std::to_string(m);
        for (double v : t.points[m]) out += ',' + fmt_real(v);
        out += ',';
        if (m < t.tags.size()) out += to_string(t.tags[m]);
        out += '\n';
    }
    return out;
}

Json orbit_summary(const OrbitTrace& t, std::size_t window) {
    const auto mono = detect_eventual_monotonicity(t, window);
    return Json{{"start", t.points.empty() ? Json(nullptr) : to_json(t.points.front())},
                {"verdict", to_string(t.verdict)},
                {"limit", t.limit ? to_json(*t.limit) : Json(nullptr)},
                {"steps_used", t.steps_used},
                {"backward", t.backward},
                {"eventual_monotonicity",
                 mono ? Json{{"cone", to_string(mono->cone)}, {"onset", mono->onset}} : Json(nullptr)}};
}

Json to_json(const RetrotoneResult& r, bool weak, std::uint64_t seed) {
    Json cx = nullptr;
    if (r.counterexample) {
        const auto& c = *r.counterexample;
        cx = Json{{"x", to_json(c.x)}, {"y", to_json(c.y)}, {"Tx", to_json(c.tx)}, {"Ty", to_json(c.ty)}, {"clause", c.clause}};
    }
    return Json{{"definition", weak ? "weak" : "strong"},
                {"seed", seed},
                {"status", to_string(r.status)},
                {"pairs", r.pairs},
                {"filtered", r.filtered},
                {"acceptance", r.acceptance},
                {"counterexample", cx}};
}

}  // namespace typek::io
