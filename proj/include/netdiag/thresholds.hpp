#pragma once

// Shared constants: injection magnitudes and the detection thresholds the
// diagnostic side applies. Injector, verifier and skills all read these, so a
// change here stays consistent everywhere.

namespace netdiag {

// dns
inline constexpr int kDnsLatencyThresholdMs = 500;
inline constexpr int kDnsLatencyInjectMs = 1500;

// resources
inline constexpr double kCpuThreshold = 0.90;
inline constexpr double kCpuInjectSender = 0.95;
inline constexpr double kCpuInjectReceiver = 0.97;
inline constexpr int kSocketSpikeThreshold = 1000;
inline constexpr int kSocketInjectCount = 5000;
inline constexpr int kAppDelayThresholdMs = 1000;
inline constexpr int kAppDelayInjectMs = 3000;
inline constexpr int kHttpLatencyThresholdMs = 1000;

// traffic control
inline constexpr int kCorruptPercent = 30;
inline constexpr int kThrottleRateKbps = 512;
inline constexpr int kIncastRateKbps = 256;

// probing
inline constexpr int kPingTx = 10;
inline constexpr int kFlapTransitionThreshold = 2;

// engine
inline constexpr int kDefaultBudget = 20;

}  // namespace netdiag
