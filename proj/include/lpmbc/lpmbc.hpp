#ifndef LPMBC_LPMBC_HPP
#define LPMBC_LPMBC_HPP

#include "lpmbc/rng.hpp"
#include "lpmbc/dataset.hpp"
#include "lpmbc/neighborhood.hpp"
#include "lpmbc/lpm.hpp"
#include "lpmbc/classifier.hpp"
#include "lpmbc/eval.hpp"
#include "lpmbc/data.hpp"

#endif
