// SPDX-License-Identifier: Apache-2.0
//
// bdfrelay: delay-aware control for buffered two-hop MIMO relay networks
// Copyright (C) 2026 The bdfrelay Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef BDFRELAY_BASELINES_HPP
#define BDFRELAY_BASELINES_HPP

/*
Reference schedulers, all at fixed full power.

  B1  backpressure, full duplex, BDF
  B2  CSIT only,    full duplex, DF
  B3  CSIT only,    half duplex, BDF
  B4  backpressure, half duplex, BDF
  B5  CSIT only,    half duplex, DF

Full-duplex relays are idealized: the receiving relay may also transmit,
no inter-relay nulling is needed and every relay uses min(N_T, N_R)
streams towards the destination. DF relays forward within the frame; in
half duplex each hop gets half the frame, so rates and average powers are
halved.
*/

#include "bdfrelay/auction.hpp"

#include <string>

namespace bdfrelay
{
    enum class Scheduler
    {
        backpressure,
        csit_only
    };

    enum class Duplex
    {
        half,
        full
    };

    enum class Protocol
    {
        bdf,
        df
    };

    struct BaselineConfig
    {
        Scheduler scheduler = Scheduler::backpressure;
        Duplex duplex = Duplex::half;
        Protocol protocol = Protocol::bdf;
        double p_src = 10.0;   ///< fixed source transmit power
        double p_relay = 10.0; ///< fixed relay transmit power
    };

    /// Presets B1..B5.
    BaselineConfig baseline_preset(int index, double p_src, double p_relay);
    /// "B1".."B5" for presets, otherwise e.g. "backpressure-half-bdf".
    std::string baseline_name(const BaselineConfig &cfg);
    /// Accepts "B1".."B5" or "<scheduler>-<duplex>-<protocol>".
    BaselineConfig baseline_from_name(const std::string &name, double p_src, double p_relay);

    /// Maximizes max(0, Q_S - Q_m) pk_S + Q_n pk_D over feasible link pairs.
    AuctionOutcome backpressure_decide(const QueueState &q, const GlobalCsi &csi, const BaselineConfig &cfg,
                                       const AuctionParams &phy);

    /// Maximizes the sum rate (BDF) or the bottleneck rate (DF), using queues
    /// only to switch off links that have nothing to send.
    AuctionOutcome csit_only_decide(const GlobalCsi &csi, const QueueState &q, const BaselineConfig &cfg,
                                    const AuctionParams &phy);

    AuctionOutcome baseline_decide(const QueueState &q, const GlobalCsi &csi, const BaselineConfig &cfg,
                                   const AuctionParams &phy);

    /// Rate of a DF relay path in bits/frame: min of the hops, halved in half duplex.
    double df_rate_bits(double sr_bits, double rd_bits, Duplex duplex);

} // namespace bdfrelay

#endif
