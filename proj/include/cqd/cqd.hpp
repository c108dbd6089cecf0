#pragma once

#include "canonical.hpp"
#include "core.hpp"
#include "eval.hpp"
#include "hom.hpp"
#include "mcgraph.hpp"
#include "opq.hpp"
#include "parse.hpp"
#include "restrict.hpp"
