#pragma once

#include "psido/error.hpp"
#include "psido/symbols/symbol_grid.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace psido {

using Rational = boost::multiprecision::cpp_rational;

/// Exact complex rational.
struct QComplex {
    Rational re;
    Rational im;

    QComplex() = default;
    QComplex(Rational r, Rational i = 0)
        : re(std::move(r))
        , im(std::move(i))
    {
    }
    QComplex(long long r)
        : re(r)
        , im(0)
    {
    }

    bool is_zero() const { return re == 0 && im == 0; }

    friend QComplex operator+(const QComplex& a, const QComplex& b) { return {a.re + b.re, a.im + b.im}; }
    friend QComplex operator-(const QComplex& a, const QComplex& b) { return {a.re - b.re, a.im - b.im}; }
    friend QComplex operator-(const QComplex& a) { return {-a.re, -a.im}; }
    friend QComplex operator*(const QComplex& a, const QComplex& b)
    {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend QComplex operator/(const QComplex& a, const QComplex& b)
    {
        const Rational den = b.re * b.re + b.im * b.im;
        if (den == 0) {
            throw Error(ErrorKind::NumericFailure, "division by zero in exact arithmetic");
        }
        return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
    }
    friend bool operator==(const QComplex& a, const QComplex& b) { return a.re == b.re && a.im == b.im; }

    cplx to_complex() const
    {
        return {static_cast<double>(re), static_cast<double>(im)};
    }
};

/// Polynomial symbol sum c_{ab} x^a xi^b with exact d x d matrix
/// coefficients (row-major). Zero coefficients are never stored.
class PolySymbol {
public:
    using Exponent = std::pair<int, int>;
    using Coeff = std::vector<QComplex>;

    explicit PolySymbol(int d = 1)
        : d_(d)
    {
        if (d < 1) {
            throw Error(ErrorKind::DimensionMismatch, "fiber dimension must be >= 1");
        }
    }

    static PolySymbol constant(QComplex c, int d = 1)
    {
        PolySymbol p(d);
        Coeff k(static_cast<std::size_t>(d) * d);
        for (int i = 0; i < d; ++i) {
            k[static_cast<std::size_t>(i) * d + i] = c;
        }
        p.add_term({0, 0}, k);
        return p;
    }

    static PolySymbol monomial(int a, int b, QComplex c = 1, int d = 1)
    {
        PolySymbol p = constant(std::move(c), d);
        PolySymbol out(d);
        for (auto& [e, k] : p.terms_) {
            out.add_term({a, b}, k);
        }
        return out;
    }

    static PolySymbol x(int d = 1) { return monomial(1, 0, 1, d); }
    static PolySymbol xi(int d = 1) { return monomial(0, 1, 1, d); }

    int d() const { return d_; }
    const std::map<Exponent, Coeff>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int degree() const
    {
        int deg = 0;
        for (const auto& [e, k] : terms_) {
            deg = std::max(deg, e.first + e.second);
        }
        return deg;
    }

    void add_term(Exponent e, const Coeff& k)
    {
        if (static_cast<int>(k.size()) != d_ * d_) {
            throw Error(ErrorKind::DimensionMismatch, "coefficient has wrong fiber size");
        }
        auto [it, fresh] = terms_.try_emplace(e, k);
        if (!fresh) {
            for (std::size_t i = 0; i < k.size(); ++i) {
                it->second[i] = it->second[i] + k[i];
            }
        }
        bool zero = true;
        for (const auto& c : it->second) {
            zero = zero && c.is_zero();
        }
        if (zero) {
            terms_.erase(it);
        }
    }

    friend PolySymbol operator+(PolySymbol a, const PolySymbol& b)
    {
        a.require_compatible(b);
        for (const auto& [e, k] : b.terms_) {
            a.add_term(e, k);
        }
        return a;
    }

    friend PolySymbol operator-(const PolySymbol& a, const PolySymbol& b) { return a + QComplex(-1) * b; }

    friend PolySymbol operator*(const QComplex& c, const PolySymbol& a)
    {
        PolySymbol out(a.d_);
        for (const auto& [e, k] : a.terms_) {
            Coeff s(k.size());
            for (std::size_t i = 0; i < k.size(); ++i) {
                s[i] = c * k[i];
            }
            out.add_term(e, s);
        }
        return out;
    }

    /// Pointwise product with matrix coefficients multiplied in order a*b.
    friend PolySymbol operator*(const PolySymbol& a, const PolySymbol& b)
    {
        a.require_compatible(b);
        const int d = a.d_;
        PolySymbol out(d);
        for (const auto& [ea, ka] : a.terms_) {
            for (const auto& [eb, kb] : b.terms_) {
                Coeff k(static_cast<std::size_t>(d) * d);
                for (int i = 0; i < d; ++i) {
                    for (int j = 0; j < d; ++j) {
                        QComplex s;
                        for (int m = 0; m < d; ++m) {
                            s = s + ka[static_cast<std::size_t>(i) * d + m] * kb[static_cast<std::size_t>(m) * d + j];
                        }
                        k[static_cast<std::size_t>(i) * d + j] = s;
                    }
                }
                out.add_term({ea.first + eb.first, ea.second + eb.second}, k);
            }
        }
        return out;
    }

    friend bool operator==(const PolySymbol& a, const PolySymbol& b)
    {
        if (a.d_ != b.d_ || a.terms_.size() != b.terms_.size()) {
            return false;
        }
        for (const auto& [e, k] : a.terms_) {
            auto it = b.terms_.find(e);
            if (it == b.terms_.end() || !(it->second == k)) {
                return false;
            }
        }
        return true;
    }

    /// d^i/dx^i d^j/dxi^j
    PolySymbol derivative(int i, int j) const
    {
        PolySymbol out(d_);
        for (const auto& [e, k] : terms_) {
            if (e.first < i || e.second < j) {
                continue;
            }
            long long f = 1;
            for (int t = 0; t < i; ++t) {
                f *= e.first - t;
            }
            for (int t = 0; t < j; ++t) {
                f *= e.second - t;
            }
            Coeff s(k.size());
            for (std::size_t m = 0; m < k.size(); ++m) {
                s[m] = QComplex(f) * k[m];
            }
            out.add_term({e.first - i, e.second - j}, s);
        }
        return out;
    }

    CMatrix evaluate(double x, double xi) const
    {
        CMatrix out = CMatrix::Zero(d_, d_);
        for (const auto& [e, k] : terms_) {
            const double mono = std::pow(x, e.first) * std::pow(xi, e.second);
            for (int i = 0; i < d_; ++i) {
                for (int j = 0; j < d_; ++j) {
                    out(i, j) += mono * k[static_cast<std::size_t>(i) * d_ + j].to_complex();
                }
            }
        }
        return out;
    }

    SymbolGrid sample(const PhaseGrid& grid) const
    {
        return SymbolGrid::sample([this](double x, double xi) { return evaluate(x, xi); }, grid, d_);
    }

    std::string to_string() const
    {
        if (terms_.empty()) {
            return "0";
        }
        std::ostringstream os;
        bool first = true;
        for (const auto& [e, k] : terms_) {
            if (!first) {
                os << " + ";
            }
            first = false;
            os << '(';
            for (std::size_t i = 0; i < k.size(); ++i) {
                if (i > 0) {
                    os << ", ";
                }
                os << k[i].re << (k[i].im < 0 ? " - " : " + ") << abs(k[i].im) << "i";
            }
            os << ')';
            if (e.first > 0) {
                os << "*x^" << e.first;
            }
            if (e.second > 0) {
                os << "*xi^" << e.second;
            }
        }
        return os.str();
    }

private:
    void require_compatible(const PolySymbol& o) const
    {
        if (d_ != o.d_) {
            throw Error(ErrorKind::DimensionMismatch, "polynomial symbols have different fiber dimensions");
        }
    }

    int d_;
    std::map<Exponent, Coeff> terms_;
};

namespace detail {

/// Recursive-descent parser for scalar polynomial expressions in x, xi, i
/// with + - * ^, integers, rationals written p/q, and parentheses.
class PolyParser {
public:
    explicit PolyParser(std::string text)
        : s_(std::move(text))
    {
    }

    PolySymbol parse()
    {
        PolySymbol out = expr();
        skip();
        if (pos_ != s_.size()) {
            fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        }
        return out;
    }

private:
    PolySymbol expr()
    {
        skip();
        bool negate = false;
        if (peek('+') || peek('-')) {
            negate = s_[pos_++] == '-';
        }
        PolySymbol out = term();
        if (negate) {
            out = QComplex(-1) * out;
        }
        for (;;) {
            skip();
            if (peek('+')) {
                ++pos_;
                out = out + term();
            } else if (peek('-')) {
                ++pos_;
                out = out - term();
            } else {
                return out;
            }
        }
    }

    PolySymbol term()
    {
        PolySymbol out = power();
        for (;;) {
            skip();
            if (peek('*')) {
                ++pos_;
                out = out * power();
            } else if (peek('/')) {
                ++pos_;
                skip();
                const long long den = integer();
                if (den == 0) {
                    fail("division by zero");
                }
                out = QComplex(Rational(1, den)) * out;
            } else {
                return out;
            }
        }
    }

    PolySymbol power()
    {
        PolySymbol base = atom();
        skip();
        if (peek('^')) {
            ++pos_;
            skip();
            const long long e = integer();
            if (e < 0 || e > 64) {
                fail("exponent out of range");
            }
            PolySymbol out = PolySymbol::constant(1);
            for (long long k = 0; k < e; ++k) {
                out = out * base;
            }
            return out;
        }
        return base;
    }

    PolySymbol atom()
    {
        skip();
        if (pos_ >= s_.size()) {
            fail("unexpected end of expression");
        }
        if (peek('(')) {
            ++pos_;
            PolySymbol inner = expr();
            skip();
            if (!peek(')')) {
                fail("missing ')'");
            }
            ++pos_;
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            return PolySymbol::constant(QComplex(Rational(integer())));
        }
        if (s_.compare(pos_, 2, "xi") == 0) {
            pos_ += 2;
            return PolySymbol::xi();
        }
        if (peek('x')) {
            ++pos_;
            return PolySymbol::x();
        }
        if (peek('i')) {
            ++pos_;
            return PolySymbol::constant(QComplex(0, 1));
        }
        fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    }

    long long integer()
    {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
        if (start == pos_ || pos_ - start > 17) {
            fail("expected an integer");
        }
        return std::stoll(s_.substr(start, pos_ - start));
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
    }

    bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw Error(ErrorKind::Usage, "polynomial parse error at column " + std::to_string(pos_ + 1) + ": " + what);
    }

    std::string s_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline PolySymbol parse_poly(const std::string& text) { return detail::PolyParser(text).parse(); }

/// {a, b} = d_x a d_xi b - d_xi a d_x b
inline PolySymbol poisson_bracket(const PolySymbol& a, const PolySymbol& b)
{
    return a.derivative(1, 0) * b.derivative(0, 1) - a.derivative(0, 1) * b.derivative(1, 0);
}

/// Exact Moyal product of polynomial symbols:
/// sum_k (i/2)^k / k! sum_j C(k, j) (-1)^{k-j} d_x^j d_xi^{k-j} a * d_xi^j d_x^{k-j} b.
inline PolySymbol moyal_poly(const PolySymbol& a, const PolySymbol& b)
{
    PolySymbol out(a.d());
    const int kmax = a.degree() + b.degree();
    QComplex factor = 1;   // (i/2)^k / k!
    for (int k = 0; k <= kmax; ++k) {
        if (k > 0) {
            factor = factor * QComplex(0, Rational(1, 2)) * QComplex(Rational(1, k));
        }
        long long binom = 1;
        for (int j = 0; j <= k; ++j) {
            if (j > 0) {
                binom = binom * (k - j + 1) / j;
            }
            const QComplex c = factor * QComplex(((k - j) % 2 == 0) ? binom : -binom);
            out = out + c * (a.derivative(j, k - j) * b.derivative(k - j, j));
        }
    }
    return out;
}

} // namespace psido
