#include "hforge/linalg.hpp"

#include "hforge/errors.hpp"

#include <utility>

namespace hforge {

std::vector<Rat> solve_linear(RatMatrix a, std::vector<Rat> b)
{
    const std::size_t n = a.size();
    if (b.size() != n)
        throw DomainError("solve_linear: dimension mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col].is_zero())
            ++pivot;
        if (pivot == n)
            throw DomainError("solve_linear: singular matrix");
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        const Rat inv = Rat(1) / a[col][col];
        for (std::size_t row = col + 1; row < n; ++row) {
            if (a[row][col].is_zero())
                continue;
            const Rat factor = a[row][col] * inv;
            for (std::size_t k = col; k < n; ++k)
                if (!a[col][k].is_zero())
                    a[row][k] -= factor * a[col][k];
            b[row] -= factor * b[col];
        }
    }
    std::vector<Rat> x(n);
    for (std::size_t i = n; i-- > 0;) {
        Rat acc = b[i];
        for (std::size_t k = i + 1; k < n; ++k)
            if (!a[i][k].is_zero())
                acc -= a[i][k] * x[k];
        x[i] = acc / a[i][i];
    }
    return x;
}

} // namespace hforge
