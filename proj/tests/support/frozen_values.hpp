#pragma once

// Generated by tests/oracles/oracle.py; do not edit by hand.

namespace frozen {

inline constexpr double kProbeImplicitRoot = 0.8636853729724889;
inline constexpr double kProbeReflectedRoot = 0.9654584289204251;
inline constexpr double kProbeArrivalRoot = 0.8807172384338698;
inline constexpr double kProbeStoppingEnumeration = 0.8807172384338697;
inline constexpr double kProbeControlEnumeration = 0.8636853729724889;
inline constexpr double kProbeConstrainedImplicitRoot = 1.5014424524349126;
inline constexpr double kProbeConstrainedArrivalRoot = 1.5015945342905581;
inline constexpr double kProbeSwitchingRoot0 = 0.7493419234318924;
inline constexpr double kProbeSwitchingRoot1 = 0.4664052333319619;

inline constexpr double kPutValueRate5 = 6.087125054006471;
inline constexpr double kPutValueRate0 = 7.971857649544319;

inline constexpr double kConstantImplicitK1000 = 0.8643941364203697;
inline constexpr double kConstantImplicitK10000 = 0.864637650608953;
inline constexpr double kConstantStoppingK1000 = 0.8643937753458086;

inline constexpr double kTwoRegimeDpRoot0 = 1.0000000000000073;
inline constexpr double kTwoRegimeDpRoot1 = 0.48223195443806616;
inline constexpr double kTwoRegimeOdeRoot0 = 1.0000000000000002;
inline constexpr double kTwoRegimeOdeRoot1 = 0.4826494441107917;

}  // namespace frozen
