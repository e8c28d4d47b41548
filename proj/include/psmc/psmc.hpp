#pragma once

#include "psmc/black_scholes.hpp"
#include "psmc/cli.hpp"
#include "psmc/config.hpp"
#include "psmc/dataset.hpp"
#include "psmc/embedding.hpp"
#include "psmc/fft.hpp"
#include "psmc/forecast.hpp"
#include "psmc/hmc.hpp"
#include "psmc/lbfgs.hpp"
#include "psmc/parallel.hpp"
#include "psmc/path.hpp"
#include "psmc/pdv.hpp"
#include "psmc/random.hpp"
#include "psmc/shadow.hpp"
#include "psmc/smile.hpp"
#include "psmc/spectra.hpp"
#include "psmc/synthesis.hpp"
#include "psmc/trading.hpp"
#include "psmc/wavelet.hpp"
