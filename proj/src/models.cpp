#include "capwave/models.hpp"

namespace capwave::models {

namespace {

flow1d::VorticityModel checked(flow1d::VorticityModel m) {
  flow1d::validate_model(m);
  return m;
}

}  // namespace

flow1d::VorticityModel zero() {
  return checked({[](double) { return 0.0; }, [](double) { return 0.0; },
                  [](double) { return 0.0; }, [](double) { return 0.0; },
                  [](double) { return 0.0; }, 0.0});
}

flow1d::VorticityModel linear_gamma(double slope) {
  return checked({[slope](double x) { return slope * x; }, [slope](double) { return slope; },
                  [](double) { return 0.0; }, [](double) { return 0.0; },
                  [](double) { return 0.0; }, 0.0});
}

flow1d::VorticityModel linear_swirl(double omega) {
  return checked({[](double) { return 0.0; }, [](double) { return 0.0; },
                  [omega](double x) { return omega * x; }, [omega](double) { return omega; },
                  [omega](double x) { return omega * omega * x; }, omega * omega});
}

flow1d::VorticityModel linear_both(double slope, double omega) {
  return checked({[slope](double x) { return slope * x; }, [slope](double) { return slope; },
                  [omega](double x) { return omega * x; }, [omega](double) { return omega; },
                  [omega](double x) { return omega * omega * x; }, omega * omega});
}

}  // namespace capwave::models
