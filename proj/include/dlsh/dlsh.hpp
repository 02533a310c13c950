#pragma once

// Everything in one include.
#include "dlsh/bench.hpp"
#include "dlsh/bounds.hpp"
#include "dlsh/dataset_io.hpp"
#include "dlsh/dispersion.hpp"
#include "dlsh/generators.hpp"
#include "dlsh/geometry.hpp"
#include "dlsh/index.hpp"
#include "dlsh/lsh_family.hpp"
#include "dlsh/packing_graph.hpp"
#include "dlsh/verify.hpp"
