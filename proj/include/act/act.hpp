#pragma once

#include "act/classifier.hpp"
#include "act/curvature_tensor.hpp"
#include "act/error.hpp"
#include "act/jacobi.hpp"
#include "act/linalg.hpp"
#include "act/random.hpp"
#include "act/scalar.hpp"
#include "act/tensor_file.hpp"
#include "act/tsankov.hpp"
