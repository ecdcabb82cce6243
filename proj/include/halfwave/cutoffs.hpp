#pragma once

namespace halfwave {

// exp(-1/t) for t > 0, else 0.
double smooth_glue(double t);

// C-infinity transition: 1 on r <= 1, 0 on r >= 2.
double transition(double r);

// Smooth bump on [inner, outer]: zero outside, one at the midpoint, monotone on each side.
double annulus_bump(double r, double inner, double outer);

// Even bump on [-1, 1] with value 1 at 0; translates by 1 sum to one.
double unit_bump(double x);

}  // namespace halfwave
