#include "argscape/fixtures.hpp"

namespace argscape {

namespace {

ArgEvent coal(double t, Particle x, Particle y, Particle child) {
  return {ArgEventType::coalesce, t, {x, y, child}, 0.0};
}

ArgEvent split(double t, Particle p, Particle left, Particle right, double mark) {
  return {ArgEventType::split, t, {p, left, right}, mark};
}

}  // namespace

ArgEventLog two_mark_fixture() {
  ArgEventLog log{5, 0.0, 1.0, 1.0, 0, ArgModel::griffiths, {}};
  log.events = {
      coal(1.0, 4, 5, 6),
      split(1.5, 1, 7, 8, kTwoMarkFirst),
      coal(2.3, 8, 2, 9),
      split(3.0, 3, 10, 11, kTwoMarkSecond),
      coal(4.0, 11, 6, 12),
      coal(5.0, 9, 10, 13),
      coal(6.0, 13, 12, 14),
      coal(7.0, 7, 14, 15),
  };
  return log;
}

ArgEventLog one_mark_fixture() {
  ArgEventLog log{5, 0.0, 1.0, 1.0, 0, ArgModel::griffiths, {}};
  log.events = {
      coal(1.0, 4, 5, 6),
      coal(2.3, 2, 3, 7),
      split(4.0, 6, 8, 9, 0.5),
      coal(5.0, 7, 8, 10),
      coal(6.0, 1, 9, 11),
      coal(7.0, 10, 11, 12),
  };
  return log;
}

}  // namespace argscape
