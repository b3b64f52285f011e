#pragma once

#include "acdt/bench.hpp"
#include "acdt/bundle.hpp"
#include "acdt/dataset.hpp"
#include "acdt/dp_mixture.hpp"
#include "acdt/pipeline.hpp"
#include "acdt/projection.hpp"
#include "acdt/random.hpp"
#include "acdt/ridge.hpp"
#include "acdt/synth.hpp"
#include "acdt/transfer.hpp"
