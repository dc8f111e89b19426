#pragma once
// Umbrella header.

#include "baire/errors.hpp"
#include "baire/madic.hpp"
#include "baire/bairetree.hpp"
#include "baire/coincidence.hpp"
#include "baire/partition.hpp"
#include "baire/oracle.hpp"
#include "baire/catalog.hpp"
#include "baire/bench.hpp"
#include "baire/io.hpp"
