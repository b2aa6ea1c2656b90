// Small-scale run of the congruence machinery: tabulates the two colored
// Frobenius counting functions, their 3-adic valuations on the special
// progressions, and one U-sequence chain.

#include <iostream>

#include "qseries/usequence.hpp"

using namespace qseries;

int main() {
    const Series psi = cpsi60_eta(24 * 41);
    const Series phi = cphi6_theta(24 * 41);

    std::cout << "n, cpsi60(n), cphi6(n):\n";
    for (long long n = 0; n <= 12; ++n)
        std::cout << "  " << n << ", " << psi.at_q(n).get_str() << ", " << phi.at_q(n).get_str()
                  << "\n";

    std::cout << "\ncpsi60 on the progression 9n + 4 (all divisible by 27):\n";
    const Series sub = extract_progression(psi, 9, 4);
    for (long long n = 0; n < 4; ++n) {
        const Rat& c = sub.at_q(n);
        const auto v = val3(Int(c.get_num()));
        std::cout << "  cpsi60(" << 9 * n + 4 << ") = " << c.get_str() << "  (3-adic valuation "
                  << (v ? std::to_string(*v) : "inf") << ")\n";
    }

    std::cout << "\nU-sequence chain, plain side, alpha <= 2:\n";
    const LSequenceState chain = build_L(Side::plain, 2, 12);
    for (const auto& row : check_divisibility(chain)) {
        std::cout << "  alpha " << row.alpha << ": min 3-adic valuation "
                  << (row.min_val3 ? std::to_string(*row.min_val3) : "inf");
        if (row.required) std::cout << " (required " << *row.required << ")";
        std::cout << "\n";
    }
    return 0;
}
