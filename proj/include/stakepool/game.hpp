#pragma once

#include <string>

namespace stakepool {

// The continuum staking-pool formation game: honest measure H, malicious
// measure M, block reward R, pool-owner reward share lambda.
struct GameParams {
    double H = 1.0;
    double M = 0.0;
    double R = 1.0;
    double lambda = 1.0;

    // Interior threshold equilibria exist only above this share.
    double lambda_bound() const { return M / (H + M); }
};

// Throws ValidationError unless H > 0, R > 0, 0 <= M < H, lambda in [0,1].
void validate(const GameParams& p);

enum class Corner {
    Interior,    // unique c* in (0, T) from the indifference equation
    AllDelegate, // lambda exactly at M/(H+M): c* = 0, honest agents delegate
    NoInterior,  // lambda below the bound: pooling unprofitable even at c = 0
    AllPool,     // threshold saturates at T: every honest agent runs a pool
    AllIdle,     // costly-delegation design outcome: delegators stay idle
};

const char* corner_name(Corner c);

// Equilibrium summary. P/D/I are measures of pool owners, delegators and
// idle agents (I = 0 in the base game; indifferent agents delegate).
struct EquilibriumResult {
    double cstar = 0.0;
    double P = 0.0;        // F(c*) H
    double D = 0.0;        // (1 - F(c*)) H - I
    double I = 0.0;
    double s = 0.0;        // delegated stake per pool, D/(P+M)
    double r = 0.0;        // expected pool reward, R/(P+M)
    double security = 0.0; // P/(P+M)
    Corner corner = Corner::Interior;
};

// Outcome of a design computation: the chosen split and what it induces.
struct DesignResult {
    double lambda = 0.0;
    double cstar = 0.0;
    double objective = 0.0; // value of whatever was optimized
    Corner corner = Corner::Interior;
    bool heuristic = false; // grid fallback was used (non-concave welfare)
    std::string note;       // human-readable caveat, empty when clean
    EquilibriumResult equilibrium;
};

} // namespace stakepool
