// Received power and SNR versus slant range for the default source, with the
// detection threshold for a few false-alarm probabilities.

#include <cstdio>

#include "meshranger/beam_optics.hpp"
#include "meshranger/blockage_detection.hpp"

int main() {
    using namespace meshranger;
    const GaussianBeam beam(100e-9, 2e-3, 200.0);
    const double rx = 1e-2, noise = 1e-4;
    const SurfaceCoefficients surface(0.7, 0.2);

    std::printf("x_R = %.2f m, total power = %.4e W\n\n", beam.rayleigh_range(), beam.total_power());
    std::printf("%8s %10s %12s %10s %12s\n", "d [m]", "w_b [mm]", "P [W]", "SNR [dB]", "blocked [dB]");
    for (double d : {50.0, 100.0, 200.0, 350.0, 500.0, 1000.0}) {
        const auto lb = link_budget(beam, rx, d, noise);
        std::printf("%8.0f %10.3f %12.4e %10.2f %12.2f\n", d, 1e3 * beam.width_at(d), lb.received_power, lb.snr_db,
                    lb.snr_db + to_db(surface.power_transmittance()));
    }
    std::printf("\n%8s %12s\n", "pfa", "gamma [dB]");
    for (double pfa : {0.01, 0.05, 0.1, 0.2}) std::printf("%8.2f %12.3f\n", pfa, np_threshold(pfa));
}
