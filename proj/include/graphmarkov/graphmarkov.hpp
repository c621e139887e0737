#pragma once

#include "graphmarkov/checkpoint.hpp"
#include "graphmarkov/eval.hpp"
#include "graphmarkov/graph.hpp"
#include "graphmarkov/matrix_io.hpp"
#include "graphmarkov/models.hpp"
#include "graphmarkov/series.hpp"
#include "graphmarkov/simulate.hpp"
#include "graphmarkov/training.hpp"
