#pragma once

#include "psido/fredholm/compactness.hpp"
#include "psido/fredholm/conjugation.hpp"
#include "psido/fredholm/converse.hpp"
#include "psido/fredholm/index.hpp"
#include "psido/fredholm/parametrix.hpp"
#include "psido/fredholm/riesz.hpp"
#include "psido/fredholm/sobolev.hpp"
