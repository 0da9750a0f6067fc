#pragma once

#include <cmath>
#include <complex>
#include <map>

namespace subh {

using cplx = std::complex<double>;

// Sparse complex Fourier spectrum keyed by the integer mode index nu.
// std::map keeps iteration order deterministic, which matters for
// reproducible parallel reductions and byte-identical output.
class Spectrum {
public:
    using Map = std::map<int, cplx>;

    void add(int nu, cplx v) {
        if (v == cplx(0.0, 0.0)) return;
        data_[nu] += v;
    }
    void set(int nu, cplx v) { data_[nu] = v; }

    cplx at(int nu) const {
        auto it = data_.find(nu);
        return it == data_.end() ? cplx(0.0, 0.0) : it->second;
    }

    bool empty() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }

    double max_abs() const {
        double m = 0.0;
        for (const auto& [nu, v] : data_) m = std::max(m, std::abs(v));
        return m;
    }

    // Largest |nu| carrying a nonzero entry; 0 for the empty spectrum.
    int max_index() const {
        int m = 0;
        for (const auto& [nu, v] : data_)
            if (v != cplx(0.0, 0.0)) m = std::max(m, std::abs(nu));
        return m;
    }

    // sum_nu c_nu e^{i nu theta}
    cplx eval(double theta) const {
        cplx s(0.0, 0.0);
        for (const auto& [nu, v] : data_)
            s += v * std::polar(1.0, nu * theta);
        return s;
    }

    // Same sum in extended precision, for residual verification.
    std::complex<long double> eval_ld(long double theta) const {
        std::complex<long double> s(0.0L, 0.0L);
        for (const auto& [nu, v] : data_) {
            long double a = nu * theta;
            std::complex<long double> e(std::cos(a), std::sin(a));
            s += std::complex<long double>(v.real(), v.imag()) * e;
        }
        return s;
    }

    // Deviation from the reality condition c_{-nu} = conj(c_nu).
    double reality_defect() const {
        double m = 0.0;
        for (const auto& [nu, v] : data_)
            m = std::max(m, std::abs(v - std::conj(at(-nu))));
        return m;
    }

    Map::const_iterator begin() const { return data_.begin(); }
    Map::const_iterator end() const { return data_.end(); }

private:
    Map data_;
};

inline Spectrum operator*(const Spectrum& a, cplx c) {
    Spectrum out;
    for (const auto& [nu, v] : a) out.add(nu, v * c);
    return out;
}

// Fourier convolution: (a*b)[nu] = sum_{n1+n2=nu} a[n1] b[n2].
inline Spectrum convolve(const Spectrum& a, const Spectrum& b) {
    Spectrum out;
    for (const auto& [n1, v1] : a)
        for (const auto& [n2, v2] : b) out.add(n1 + n2, v1 * v2);
    return out;
}

inline Spectrum& operator+=(Spectrum& a, const Spectrum& b) {
    for (const auto& [nu, v] : b) a.add(nu, v);
    return a;
}

} // namespace subh
