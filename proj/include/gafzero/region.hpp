#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <variant>

namespace gafzero {

using cplx = std::complex<double>;

struct Disc {
    cplx center;
    double radius;
};

struct Box {
    cplx lo; // corner with minimal re and im
    cplx hi;
};

/// Planar region in the model's chart: a closed disc or an axis-aligned box.
using Region = std::variant<Disc, Box>;

inline bool contains(const Region& reg, cplx z) {
    if (const auto* d = std::get_if<Disc>(&reg))
        return std::abs(z - d->center) <= d->radius;
    const auto& b = std::get<Box>(reg);
    return z.real() >= b.lo.real() && z.real() <= b.hi.real() &&
           z.imag() >= b.lo.imag() && z.imag() <= b.hi.imag();
}

inline Box bounding_box(const Region& reg) {
    if (const auto* d = std::get_if<Disc>(&reg))
        return {d->center - cplx(d->radius, d->radius),
                d->center + cplx(d->radius, d->radius)};
    return std::get<Box>(reg);
}

inline double area(const Region& reg) {
    if (const auto* d = std::get_if<Disc>(&reg))
        return M_PI * d->radius * d->radius;
    const auto& b = std::get<Box>(reg);
    return (b.hi.real() - b.lo.real()) * (b.hi.imag() - b.lo.imag());
}

/// Max |z| over the closure of the region.
inline double sup_abs(const Region& reg) {
    if (const auto* d = std::get_if<Disc>(&reg))
        return std::abs(d->center) + d->radius;
    const auto& b = std::get<Box>(reg);
    double m = 0;
    for (double x : {b.lo.real(), b.hi.real()})
        for (double y : {b.lo.imag(), b.hi.imag()})
            m = std::max(m, std::hypot(x, y));
    return m;
}

/// Scale the region about its center by `factor` (>= 1 dilates).
inline Region dilate(const Region& reg, double factor) {
    if (const auto* d = std::get_if<Disc>(&reg))
        return Disc{d->center, d->radius * factor};
    const auto& b = std::get<Box>(reg);
    cplx c = 0.5 * (b.lo + b.hi);
    return Box{c + (b.lo - c) * factor, c + (b.hi - c) * factor};
}

inline bool is_disc(const Region& reg) { return std::holds_alternative<Disc>(reg); }

inline double dist_to_region(const Region& reg, cplx z) {
    if (const auto* d = std::get_if<Disc>(&reg))
        return std::max(0.0, std::abs(z - d->center) - d->radius);
    const auto& b = std::get<Box>(reg);
    double dx = std::max({b.lo.real() - z.real(), 0.0, z.real() - b.hi.real()});
    double dy = std::max({b.lo.imag() - z.imag(), 0.0, z.imag() - b.hi.imag()});
    return std::hypot(dx, dy);
}

} // namespace gafzero
