#pragma once

// Umbrella header: pulls in the whole spectral fractional-Leibniz toolkit.

#include "fraclr/grid.hpp"
#include "fraclr/fft.hpp"
#include "fraclr/spectral.hpp"
#include "fraclr/rng.hpp"
#include "fraclr/quadrature.hpp"
#include "fraclr/maximal.hpp"
#include "fraclr/lp_family.hpp"
#include "fraclr/symbols.hpp"
#include "fraclr/bilinear.hpp"
#include "fraclr/leibniz.hpp"
#include "fraclr/families.hpp"
#include "fraclr/io.hpp"
#include "fraclr/sweep.hpp"
