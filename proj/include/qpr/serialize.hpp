#pragma once

// Stage results <-> snapshot sections.

#include "qpr/channel.hpp"
#include "qpr/csv.hpp"
#include "qpr/dotsolver.hpp"
#include "qpr/protocol.hpp"
#include "qpr/scattering.hpp"
#include "qpr/snapshot.hpp"

namespace qpr {

Snapshot to_snapshot(const ChannelSet& set, const std::string& key);
ChannelSet channel_set_from(const Snapshot& snap);

Snapshot to_snapshot(const ChannelPotential& pot, const std::string& key);
ChannelPotential channel_potential_from(const Snapshot& snap);

void append_kraus(Snapshot& snap, const KrausSet& kraus);
KrausSet kraus_from(const Snapshot& snap);

/// Columns p, weight, incident, then re_i_j, im_i_j for every matrix entry.
CsvTable kraus_table(const KrausSet& kraus);

/// One section per depth: records, probabilities, leaked weight, rho entries.
Snapshot to_snapshot(const BranchTree& tree, const std::string& key);

}  // namespace qpr
