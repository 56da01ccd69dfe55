#pragma once

#include "spectre/errors.hpp"
#include "spectre/tensor.hpp"

#include "spectre/core/activation.hpp"
#include "spectre/core/dft_oracle.hpp"
#include "spectre/core/fft.hpp"
#include "spectre/core/twiddle.hpp"
#include "spectre/core/wavelet.hpp"

#include "spectre/layer/config.hpp"
#include "spectre/layer/gate.hpp"
#include "spectre/layer/mixer.hpp"
#include "spectre/layer/weights.hpp"
#include "spectre/layer/wrm.hpp"

#include "spectre/cache/memory_bank.hpp"
#include "spectre/cache/prefix_cache.hpp"

#include "spectre/model/attention.hpp"
#include "spectre/model/block.hpp"
#include "spectre/model/config.hpp"
#include "spectre/model/container.hpp"
#include "spectre/model/generate.hpp"
#include "spectre/model/serialize.hpp"
#include "spectre/model/weights.hpp"

#include "spectre/bench/csv.hpp"
#include "spectre/bench/slope.hpp"
#include "spectre/bench/sweep.hpp"
#include "spectre/bench/types.hpp"
#include "spectre/bench/verify.hpp"
