#pragma once

#include <numeric>
#include <vector>

#include "spectra/errors.hpp"

namespace spectra {

// Combinatorial type of a marked bordered surface (S, M). boundary_marks
// lists k_i for the genuine boundary components of the blown-up surface S';
// punctures are interior marked points and contribute k_i = 0 components.
struct MarkedBorderedSurface {
    int genus = 0;
    std::vector<int> boundary_marks;
    int punctures = 0;

    bool operator==(const MarkedBorderedSurface&) const = default;
};

inline void validate(const MarkedBorderedSurface& s) {
    if (s.genus < 0 || s.punctures < 0)
        throw InvalidInput("negative genus or puncture count");
    long total = s.punctures;
    for (int k : s.boundary_marks) {
        if (k < 1)
            throw InvalidInput("boundary component without a marked point");
        total += k;
    }
    if (total == 0) throw InvalidInput("marked point set is empty");
}

// n = 6g - 6 + sum_i (k_i + 3), punctures contributing k_i = 0 terms.
inline int dimension(const MarkedBorderedSurface& s) {
    validate(s);
    int n = 6 * s.genus - 6;
    for (int k : s.boundary_marks) n += k + 3;
    n += 3 * s.punctures;
    return n;
}

// The six exclusions of the amenability definition.
inline bool is_amenable(const MarkedBorderedSurface& s) {
    validate(s);
    const bool closed = s.boundary_marks.empty();
    const int d = static_cast<int>(s.boundary_marks.size());
    if (closed && s.punctures == 1) return false;                    // (1)
    if (closed && s.genus == 0 && s.punctures <= 5) return false;    // (2)
    if (s.genus == 0 && d == 1) {
        const int k = s.boundary_marks[0];
        if (s.punctures == 0 && k <= 4) return false;                // (3)
        if (s.punctures == 1 && (k == 1 || k == 2 || k == 4)) return false;  // (4)
        if (s.punctures == 2 && k == 2) return false;                // (5)
    }
    if (s.genus == 0 && d == 2 && s.punctures == 0 &&
        s.boundary_marks[0] == 1 && s.boundary_marks[1] == 1)
        return false;                                                // (6)
    return true;
}

inline MarkedBorderedSurface polygon_surface(int marks) {
    return MarkedBorderedSurface{0, {marks}, 0};
}

inline MarkedBorderedSurface punctured_polygon_surface(int marks) {
    return MarkedBorderedSurface{0, {marks}, 1};
}

}  // namespace spectra
