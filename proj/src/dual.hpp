#pragma once

#include <array>
#include <cmath>

namespace gts::ad {

/// Forward-mode dual number carrying N partial derivatives.
template <int N>
struct Dual {
    double v = 0.0;
    std::array<double, N> d{};

    Dual() = default;
    Dual(double value) : v(value) {}  // NOLINT(google-explicit-constructor)

    static Dual variable(double value, int index) {
        Dual x(value);
        x.d[static_cast<std::size_t>(index)] = 1.0;
        return x;
    }

    Dual& operator+=(const Dual& o) {
        v += o.v;
        for (int i = 0; i < N; ++i) {
            d[i] += o.d[i];
        }
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        v -= o.v;
        for (int i = 0; i < N; ++i) {
            d[i] -= o.d[i];
        }
        return *this;
    }
    Dual& operator*=(const Dual& o) {
        for (int i = 0; i < N; ++i) {
            d[i] = d[i] * o.v + v * o.d[i];
        }
        v *= o.v;
        return *this;
    }
    Dual& operator/=(const Dual& o) {
        v /= o.v;
        for (int i = 0; i < N; ++i) {
            d[i] = (d[i] - v * o.d[i]) / o.v;
        }
        return *this;
    }
    Dual operator-() const {
        Dual r;
        r.v = -v;
        for (int i = 0; i < N; ++i) {
            r.d[i] = -d[i];
        }
        return r;
    }
};

template <int N>
Dual<N> operator+(Dual<N> a, const Dual<N>& b) {
    return a += b;
}
template <int N>
Dual<N> operator-(Dual<N> a, const Dual<N>& b) {
    return a -= b;
}
template <int N>
Dual<N> operator*(Dual<N> a, const Dual<N>& b) {
    return a *= b;
}
template <int N>
Dual<N> operator/(Dual<N> a, const Dual<N>& b) {
    return a /= b;
}
template <int N>
Dual<N> operator+(Dual<N> a, double b) {
    a.v += b;
    return a;
}
template <int N>
Dual<N> operator+(double a, Dual<N> b) {
    b.v += a;
    return b;
}
template <int N>
Dual<N> operator-(Dual<N> a, double b) {
    a.v -= b;
    return a;
}
template <int N>
Dual<N> operator-(double a, const Dual<N>& b) {
    Dual<N> r = -b;
    r.v = a - b.v;
    return r;
}
template <int N>
Dual<N> operator*(Dual<N> a, double b) {
    a.v *= b;
    for (auto& x : a.d) {
        x *= b;
    }
    return a;
}
template <int N>
Dual<N> operator*(double a, Dual<N> b) {
    b.v = a * b.v;
    for (auto& x : b.d) {
        x = a * x;
    }
    return b;
}
template <int N>
Dual<N> operator/(Dual<N> a, double b) {
    a.v /= b;
    for (auto& x : a.d) {
        x /= b;
    }
    return a;
}
template <int N>
Dual<N> operator/(double a, const Dual<N>& b) {
    return Dual<N>(a) / b;
}

template <int N>
Dual<N> log(const Dual<N>& x) {
    Dual<N> r;
    r.v = std::log(x.v);
    for (int i = 0; i < N; ++i) {
        r.d[i] = x.d[i] / x.v;
    }
    return r;
}

template <int N>
Dual<N> tanh(const Dual<N>& x) {
    Dual<N> r;
    r.v = std::tanh(x.v);
    const double slope = 1.0 - r.v * r.v;
    for (int i = 0; i < N; ++i) {
        r.d[i] = slope * x.d[i];
    }
    return r;
}

inline double value(double x) { return x; }

template <int N>
double value(const Dual<N>& x) {
    return x.v;
}

}  // namespace gts::ad
