#pragma once

#include "p3net/error.hpp"
#include "p3net/geometry.hpp"
#include "p3net/io.hpp"
#include "p3net/layout.hpp"
#include "p3net/manifold.hpp"
#include "p3net/quantum.hpp"
#include "p3net/stats.hpp"
#include "p3net/strategy.hpp"
