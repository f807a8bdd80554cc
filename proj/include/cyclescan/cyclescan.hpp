#pragma once

#include "cyclescan/cwt.hpp"
#include "cyclescan/devindex.hpp"
#include "cyclescan/dma.hpp"
#include "cyclescan/error.hpp"
#include "cyclescan/fixtures.hpp"
#include "cyclescan/ingest.hpp"
#include "cyclescan/intervals.hpp"
#include "cyclescan/market.hpp"
#include "cyclescan/peaks.hpp"
#include "cyclescan/pipeline.hpp"
#include "cyclescan/spectral_stats.hpp"
#include "cyclescan/stats.hpp"
#include "cyclescan/synth.hpp"
