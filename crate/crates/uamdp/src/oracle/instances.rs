//! Reference problem instances. Each one stresses a different failure mode:
//! hypothesis mirroring (exploration), delayed payoffs (lookahead depth),
//! a greedy trap (deep lookahead), transition noise (return variance), and
//! a three-hypothesis mix. JSON copies ship under `data/tiny/`; a test pins
//! the files to these constructors.

use super::tiny::TinyBamdp;

/// Deterministic mirror: one action leads to the +1 state, the other to the
/// −0.5 state, and the two hypotheses swap which is which.
pub fn mirror_chain() -> TinyBamdp {
    let to = |s: usize| {
        let mut row = vec![0.0; 3];
        row[s] = 1.0;
        row
    };
    let theta0: Vec<Vec<Vec<f64>>> = (0..3).map(|_| vec![to(1), to(2)]).collect();
    let theta1: Vec<Vec<Vec<f64>>> = (0..3).map(|_| vec![to(2), to(1)]).collect();
    TinyBamdp {
        name: "mirror_chain".into(),
        states: 3,
        actions: 2,
        transitions: vec![theta0, theta1],
        rewards: vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![-0.5, -0.5]],
        prior: vec![0.5, 0.5],
        horizon: 3,
        discount: 0.95,
        initial_state: 0,
    }
}

/// Two correct moves reach the +1 state via a 0.2 waypoint; wrong moves
/// reset to the start. Hypotheses swap which action is correct.
pub fn delayed_payoff() -> TinyBamdp {
    let to = |s: usize| {
        let mut row = vec![0.0; 3];
        row[s] = 1.0;
        row
    };
    // theta 0: action 0 advances; theta 1: action 1 advances.
    let advance = |correct: usize| -> Vec<Vec<Vec<f64>>> {
        (0..3)
            .map(|s| {
                (0..2)
                    .map(|a| {
                        if s == 2 {
                            to(2) // absorbing payoff state
                        } else if a == correct {
                            to(s + 1)
                        } else {
                            to(0)
                        }
                    })
                    .collect()
            })
            .collect()
    };
    TinyBamdp {
        name: "delayed_payoff".into(),
        states: 3,
        actions: 2,
        transitions: vec![advance(0), advance(1)],
        rewards: vec![vec![0.0, 0.0], vec![0.2, 0.2], vec![1.0, 1.0]],
        prior: vec![0.5, 0.5],
        horizon: 3,
        discount: 0.95,
        initial_state: 0,
    }
}

/// A 0.3-per-step loop at the start competes with a two-move path to a +1
/// absorbing state. The deep path wins only under hypothesis 0, and seeing
/// that requires three steps of lookahead.
pub fn greedy_trap() -> TinyBamdp {
    let to = |s: usize| {
        let mut row = vec![0.0; 3];
        row[s] = 1.0;
        row
    };
    // theta 0: deferred path open (0 -a1-> 1 -a1-> 2).
    let theta0 = vec![
        vec![to(0), to(1)], // state 0: a0 loops, a1 advances
        vec![to(0), to(2)], // state 1: a0 resets, a1 reaches payoff
        vec![to(2), to(2)], // state 2 absorbing
    ];
    // theta 1: deferred path blocked, looping is all there is.
    let theta1 = vec![
        vec![to(0), to(0)],
        vec![to(0), to(0)],
        vec![to(2), to(2)],
    ];
    TinyBamdp {
        name: "greedy_trap".into(),
        states: 3,
        actions: 2,
        transitions: vec![theta0, theta1],
        rewards: vec![vec![0.3, 0.0], vec![0.0, 0.0], vec![1.0, 1.0]],
        prior: vec![0.5, 0.5],
        horizon: 3,
        discount: 0.95,
        initial_state: 0,
    }
}

/// Stochastic mirror: the favored action reaches the +1 state with
/// probability 0.8 and the −1 state otherwise; hypotheses swap the favored
/// action. Return variance makes regret estimation genuinely statistical.
pub fn noisy_mirror() -> TinyBamdp {
    let mix = |good: f64| vec![0.0, good, 1.0 - good];
    let theta0: Vec<Vec<Vec<f64>>> = (0..3).map(|_| vec![mix(0.8), mix(0.2)]).collect();
    let theta1: Vec<Vec<Vec<f64>>> = (0..3).map(|_| vec![mix(0.2), mix(0.8)]).collect();
    TinyBamdp {
        name: "noisy_mirror".into(),
        states: 3,
        actions: 2,
        transitions: vec![theta0, theta1],
        rewards: vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![-1.0, -1.0]],
        prior: vec![0.5, 0.5],
        horizon: 3,
        discount: 0.95,
        initial_state: 0,
    }
}

/// Three hypotheses: action 0 favored, action 1 favored, and a sluggish
/// regime where both actions are mediocre.
pub fn three_regimes() -> TinyBamdp {
    let theta0: Vec<Vec<Vec<f64>>> = (0..3)
        .map(|_| vec![vec![0.1, 0.8, 0.1], vec![0.1, 0.1, 0.8]])
        .collect();
    let theta1: Vec<Vec<Vec<f64>>> = (0..3)
        .map(|_| vec![vec![0.1, 0.1, 0.8], vec![0.1, 0.8, 0.1]])
        .collect();
    let theta2: Vec<Vec<Vec<f64>>> = (0..3)
        .map(|_| vec![vec![0.6, 0.2, 0.2], vec![0.2, 0.4, 0.4]])
        .collect();
    TinyBamdp {
        name: "three_regimes".into(),
        states: 3,
        actions: 2,
        transitions: vec![theta0, theta1, theta2],
        rewards: vec![vec![0.0, 0.0], vec![0.8, 0.8], vec![-0.6, -0.6]],
        prior: vec![0.4, 0.4, 0.2],
        horizon: 3,
        discount: 0.95,
        initial_state: 0,
    }
}

/// All five reference instances, in shipping order.
pub fn all_reference_instances() -> Vec<TinyBamdp> {
    vec![
        mirror_chain(),
        delayed_payoff(),
        greedy_trap(),
        noisy_mirror(),
        three_regimes(),
    ]
}
