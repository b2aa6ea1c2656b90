// Minimal tour of the series engine: the reciprocal of the eta prefix
// generates the partition numbers, and the pentagonal expansion shows up
// in the eta series itself.

#include <iostream>

#include "qseries/etaq.hpp"

using namespace qseries;

int main() {
    const Exponent24 window = 24 * 20;

    const Series eta1 = eta_series(1, window);
    std::cout << "eta(1) opens as: " << eta1.to_string(6) << "\n";

    const Series partitions = invert(eta1);
    std::cout << "partition numbers p(0..15):";
    for (long long n = 0; n < 16; ++n) std::cout << " " << partitions.at(24 * n - 1).get_str();
    std::cout << "\n";

    // the same thing through the expression grammar used by the CLI
    const Series via_quotient = expand(EtaQuotient(1, 1, {{1, -1}}), window);
    std::cout << "eta(1)^-1 * q^(1/24) agrees: "
              << agree_up_to(partitions, shift(via_quotient, -1),
                             std::min(partitions.trunc(), via_quotient.trunc() - 1))
                     .agree
              << "\n";
    return 0;
}
