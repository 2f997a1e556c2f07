// Writes data/synthetic_clean.csv and data/synthetic_noisy.csv.
// Truth: default life parameters; start (30, 30, 0); monthly samples t = 0..60.
#include <fstream>
#include <iostream>
#include <string>

#include "tyc/calibrate.hpp"

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "data";
  const tyc::LifeParams truth;
  const tyc::State init{30.0, 30.0, 0.0};
  const auto write = [&](const std::string& name, double noise) {
    std::ofstream out(dir + "/" + name);
    out << "# synthetic: beta=" << truth.beta << " delta=" << truth.delta << " K=" << truth.cap_k
        << " init=(30,30,0) noise=" << noise << " seed=42\n";
    tyc::write_observations_csv(out, tyc::synthesize_observations(truth, init, 60, noise, 42, true));
    if (!out) {
      std::cerr << "cannot write " << dir << "/" << name << '\n';
      return false;
    }
    return true;
  };
  return write("synthetic_clean.csv", 0.0) && write("synthetic_noisy.csv", 0.05) ? 0 : 4;
}
