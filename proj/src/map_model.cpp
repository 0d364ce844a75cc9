#include "typek/map_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "typek/errors.hpp"

namespace typek {

KolmogorovMap::KolmogorovMap(std::string name, ConeSplit split, Box domain, Params params,
                             std::shared_ptr<const GrowthModel> model)
    : name_(std::move(name)), split_(split), domain_(std::move(domain)), params_(std::move(params)),
      model_(std::move(model)) {
    if (!model_) throw Error("KolmogorovMap needs a growth model");
    if (model_->dim() != split_.n() || domain_.dim() != split_.n()) {
        throw DimensionError("map dimension mismatch between split, domain and growth model");
    }
}

double KolmogorovMap::param(std::string_view name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw Error("map has no parameter '" + std::string(name) + "'");
    return it->second;
}

Vec KolmogorovMap::f(const Vec& x) const {
    if (x.size() != dim()) throw DimensionError("f: expected dimension " + std::to_string(dim()));
    std::vector<double> out(dim());
    model_->eval_f(x.values(), out);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!std::isfinite(out[i])) {
            throw EvaluationError("f" + std::to_string(i + 1) + " is not finite at x = " + x.str());
        }
    }
    return Vec(std::move(out));
}

Mat KolmogorovMap::grad_f(const Vec& x) const {
    if (x.size() != dim()) throw DimensionError("grad_f: expected dimension " + std::to_string(dim()));
    Mat j(dim());
    model_->eval_grad(x.values(), j);
    for (std::size_t r = 0; r < dim(); ++r)
        for (std::size_t c = 0; c < dim(); ++c)
            if (!std::isfinite(j(r, c))) {
                throw EvaluationError("d f" + std::to_string(r + 1) + " / d x" + std::to_string(c + 1) +
                                      " is not finite at x = " + x.str());
            }
    return j;
}

Vec eval_T(const KolmogorovMap& map, const Vec& x) {
    const Vec fx = map.f(x);
    std::vector<double> t(x.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = x[i] * fx[i];
    return Vec(std::move(t));
}

Mat eval_M(const KolmogorovMap& map, const Vec& x) {
    const Vec fx = map.f(x);
    for (std::size_t i = 0; i < fx.size(); ++i) {
        if (!(fx[i] > 0.0)) {
            throw DomainError("f" + std::to_string(i + 1) + " <= 0 at x = " + x.str());
        }
    }
    const Mat df = map.grad_f(x);
    Mat m(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) m(i, j) = -(x[i] / fx[i]) * df(i, j);
    return m;
}

Mat eval_DT(const KolmogorovMap& map, const Vec& x) {
    const Vec fx = map.f(x);
    const Mat m = eval_M(map, x);
    Mat dt(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) dt(i, j) = fx[i] * ((i == j ? 1.0 : 0.0) - m(i, j));
    return dt;
}

Mat jacobian_T_direct(const KolmogorovMap& map, const Vec& x) {
    const Vec fx = map.f(x);
    const Mat df = map.grad_f(x);
    Mat j(x.size());
    for (std::size_t r = 0; r < x.size(); ++r)
        for (std::size_t c = 0; c < x.size(); ++c) j(r, c) = (r == c ? fx[r] : 0.0) + x[r] * df(r, c);
    return j;
}

// ---------------------------------------------------------------------------
// Example 1

namespace {

class Example1Model final : public GrowthModel {
public:
    Example1Model(double a, double b) : a_(a), b_(b) {}

    std::size_t dim() const override { return 2; }

    void eval_f(std::span<const double> x, std::span<double> out) const override {
        out[0] = 1.0 + b_ * std::atan(arg(x[0], x[1]));
        out[1] = 1.0 + b_ * std::atan(arg(x[1], x[0]));
    }

    void eval_grad(std::span<const double> x, Mat& jac) const override {
        for (int i = 0; i < 2; ++i) {
            const double own = x[i];
            const double other = x[1 - i];
            const double d = own - 1.0;
            const double s = arg(own, other);
            const double w = b_ / (1.0 + s * s);
            jac(i, i) = -w * (a_ + 3.0 * d * d);
            jac(i, 1 - i) = w;
        }
    }

private:
    // Same operation order as the source text "x2 - 1 - a*(x1-1) - (x1-1)^3".
    double arg(double own, double other) const {
        const double d = own - 1.0;
        return other - 1.0 - a_ * d - d * d * d;
    }

    double a_;
    double b_;
};

}  // namespace

double example1_b_bound(double a) {
    return std::min(a / std::numbers::pi, 1.0 / (8.0 + 2.0 * a + std::atan(2.0 + a)));
}

double example1_norm_bound(double a, double b) {
    return 2.0 * (a + 4.0) * b / (1.0 - b * std::atan(2.0 + a));
}

KolmogorovMap builtin_example1(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError("example1 needs a > 0 and b > 0");
    }
    KolmogorovMap map("example1", ConeSplit(2, 1), Box::from_origin(Vec{2.0, 2.0}), Params{{"a", a}, {"b", b}},
                      std::make_shared<Example1Model>(a, b));
    map.mark_example1();
    const double bound = example1_b_bound(a);
    if (!(b < bound)) {
        std::ostringstream os;
        os.precision(17);
        os << "parameter condition b < min{a/pi, 1/(8+2a+atan(2+a))} = " << bound << " violated (b = " << b << ")";
        map.add_warning(os.str());
    }
    return map;
}

double diagonal_map_g(const KolmogorovMap& map, double u) {
    if (!map.is_example1()) throw Error("diagonal_map_g is defined for the symmetric example1 map only");
    const double a = map.param("a");
    const double b = map.param("b");
    const double d = u - 1.0;
    return u * (1.0 + b * std::atan(d * (1.0 - a - d * d)));
}

// ---------------------------------------------------------------------------
// Parsed maps

namespace {

class ExprModel final : public GrowthModel {
public:
    explicit ExprModel(std::vector<expr::ExprPtr> f) : f_(std::move(f)) {
        for (const auto& fi : f_) {
            std::vector<expr::ExprPtr> row;
            for (std::size_t j = 0; j < f_.size(); ++j) row.push_back(expr::differentiate(fi, j));
            grad_.push_back(std::move(row));
        }
    }

    std::size_t dim() const override { return f_.size(); }

    void eval_f(std::span<const double> x, std::span<double> out) const override {
        for (std::size_t i = 0; i < f_.size(); ++i) out[i] = expr::evaluate(*f_[i], x);
    }

    void eval_grad(std::span<const double> x, Mat& jac) const override {
        for (std::size_t i = 0; i < f_.size(); ++i)
            for (std::size_t j = 0; j < f_.size(); ++j) jac(i, j) = expr::evaluate(*grad_[i][j], x);
    }

private:
    std::vector<expr::ExprPtr> f_;
    std::vector<std::vector<expr::ExprPtr>> grad_;
};

struct Statement {
    std::string_view lhs;
    std::string_view rhs;
    std::size_t line;
    std::size_t lhs_col;
    std::size_t rhs_col;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

// Trim, returning the number of leading characters removed.
std::string_view trim(std::string_view s, std::size_t* lead = nullptr) {
    std::size_t b = 0;
    while (b < s.size() && is_space(s[b])) ++b;
    std::size_t e = s.size();
    while (e > b && is_space(s[e - 1])) --e;
    if (lead) *lead = b;
    return s.substr(b, e - b);
}

std::vector<Statement> split_statements(std::string_view src) {
    std::vector<Statement> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= src.size()) {
        ++line_no;
        std::size_t eol = src.find('\n', pos);
        if (eol == std::string_view::npos) eol = src.size();
        std::string_view line = src.substr(pos, eol - pos);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        std::size_t start = 0;
        while (start <= line.size()) {
            std::size_t semi = line.find(';', start);
            if (semi == std::string_view::npos) semi = line.size();
            std::string_view stmt = line.substr(start, semi - start);
            std::size_t lead = 0;
            std::string_view t = trim(stmt, &lead);
            if (!t.empty()) {
                const std::size_t eq = t.find('=');
                const std::size_t col = start + lead + 1;
                if (eq == std::string_view::npos) throw ParseError("expected '<name> = <value>'", line_no, col);
                std::size_t rlead = 0;
                std::string_view rhs = trim(t.substr(eq + 1), &rlead);
                out.push_back({trim(t.substr(0, eq)), rhs, line_no, col, col + eq + 1 + rlead});
            }
            start = semi + 1;
        }
        pos = eol + 1;
    }
    return out;
}

double parse_real(std::string_view text, std::size_t line, std::size_t col) {
    const std::string s(trim(text));
    if (s.empty()) throw ParseError("expected a real number", line, col);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) {
        throw ParseError("malformed real number '" + s + "'", line, col);
    }
    return v;
}

long parse_int(std::string_view text, std::size_t line, std::size_t col) {
    const std::string s(trim(text));
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size()) throw ParseError("expected an integer, got '" + s + "'", line, col);
    return v;
}

bool is_identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

}  // namespace

KolmogorovMap parse_map(std::string_view source, const Params& overrides) {
    const auto stmts = split_statements(source);

    std::optional<long> dim;
    std::optional<long> split_k;
    std::optional<std::vector<double>> r;
    Params params;
    std::map<long, const Statement*> f_stmts;
    std::size_t last_line = 1;

    for (const auto& st : stmts) {
        last_line = st.line;
        if (st.lhs == "dim") {
            dim = parse_int(st.rhs, st.line, st.rhs_col);
        } else if (st.lhs == "split_k") {
            split_k = parse_int(st.rhs, st.line, st.rhs_col);
        } else if (st.lhs == "r") {
            std::size_t lead = 0;
            std::string_view body = trim(st.rhs, &lead);
            if (body.size() < 2 || body.front() != '(' || body.back() != ')') {
                throw ParseError("r must be written as (r1, ..., rn)", st.line, st.rhs_col);
            }
            std::vector<double> vals;
            std::size_t p = 1;
            while (p < body.size()) {
                std::size_t comma = body.find(',', p);
                if (comma == std::string_view::npos) comma = body.size() - 1;
                vals.push_back(parse_real(body.substr(p, comma - p), st.line, st.rhs_col + p));
                p = comma + 1;
            }
            r = std::move(vals);
        } else if (st.lhs.starts_with("param")) {
            std::string_view name = trim(st.lhs.substr(5));
            if (st.lhs.size() == 5 || !is_space(st.lhs[5]) || !is_identifier(name)) {
                throw ParseError("expected 'param <name> = <real>'", st.line, st.lhs_col);
            }
            params[std::string(name)] = parse_real(st.rhs, st.line, st.rhs_col);
        } else if (st.lhs.size() >= 2 && st.lhs[0] == 'f') {
            const long i = parse_int(st.lhs.substr(1), st.line, st.lhs_col + 1);
            if (i < 1) throw ParseError("growth functions are numbered from f1", st.line, st.lhs_col);
            if (f_stmts.count(i)) throw ParseError("f" + std::to_string(i) + " defined twice", st.line, st.lhs_col);
            f_stmts[i] = &st;
        } else {
            throw ParseError("unknown declaration '" + std::string(st.lhs) + "'", st.line, st.lhs_col);
        }
    }

    if (!dim) throw ParseError("missing 'dim = <n>'", last_line, 1);
    if (!split_k) throw ParseError("missing 'split_k = <k>'", last_line, 1);
    if (!r) throw ParseError("missing 'r = (...)'", last_line, 1);
    if (*dim < 2) throw DimensionError("dim must be at least 2");
    const auto n = static_cast<std::size_t>(*dim);
    if (*split_k < 1 || *split_k >= *dim) {
        throw DimensionError("split_k must satisfy 1 <= k < dim, got " + std::to_string(*split_k));
    }
    if (r->size() != n) {
        throw DimensionError("r has " + std::to_string(r->size()) + " components, dim is " + std::to_string(n));
    }
    for (double ri : *r)
        if (!(ri > 0.0)) throw DomainError("r must be strictly positive");
    if (f_stmts.size() != n || f_stmts.rbegin()->first != *dim) {
        throw DimensionError("expected exactly f1..f" + std::to_string(n) + " to be defined");
    }

    for (const auto& [k, v] : overrides) params[k] = v;

    expr::Symbols sym;
    sym.n_vars = n;
    sym.params = params;
    std::vector<expr::ExprPtr> fs;
    for (const auto& [i, st] : f_stmts) fs.push_back(expr::parse(st->rhs, sym, st->line, st->rhs_col));

    KolmogorovMap map("custom", ConeSplit(n, static_cast<std::size_t>(*split_k)), Box::from_origin(Vec(*r)),
                      std::move(params), std::make_shared<ExprModel>(std::move(fs)));

    // Positivity probe on a 5^n grid of [0, r].
    const std::size_t per_axis = 5;
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= per_axis;
    std::vector<double> x(n), out(n);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = (*r)[i] * static_cast<double>(rem % per_axis) / static_cast<double>(per_axis - 1);
            rem /= per_axis;
        }
        map.f_raw(x, out);
        for (std::size_t i = 0; i < n; ++i) {
            if (!(out[i] > 0.0) || !std::isfinite(out[i])) {
                std::ostringstream os;
                os.precision(17);
                os << "f" << (i + 1) << " is not positive and finite at probe point " << Vec(x).str()
                   << " (value " << out[i] << ")";
                throw DomainError(os.str());
            }
        }
    }
    return map;
}

KolmogorovMap load_map_file(const std::string& path, const Params& overrides) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read map file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_map(ss.str(), overrides);
}

}  // namespace typek
