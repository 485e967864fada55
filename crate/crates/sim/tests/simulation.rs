use cryoctl_core::Scenario;
use cryoctl_sim::{
    decode_dataword, encode_dataword, run_simulation, DataWord, MemoryBank, RfCommandWord,
    Simulator, Stimulus, WordFormat, WordKind,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RF_PERIOD_NS: f64 = 1e9 / 600e6;

fn fmt() -> WordFormat {
    WordFormat::new(12, 10, 9, 256).unwrap()
}

fn sim() -> Simulator {
    Simulator::from_scenario(&Scenario::baseline()).unwrap()
}

fn bias_word(address: u8, payload: u32) -> DataWord {
    DataWord {
        kind: WordKind::Bias,
        address,
        payload,
    }
}

fn rf_word(address: u8, payload: u32) -> DataWord {
    DataWord {
        kind: WordKind::Rf,
        address,
        payload,
    }
}

#[test]
fn protocol_write_lands_in_register() {
    let mut s = sim();
    s.queue_word(bias_word(0, 0x5a5)).unwrap();
    assert!(s.run_until_quiescent(1e5));
    assert_eq!(s.memory().read_bias(0), 0x5a5);
    assert_eq!(s.summary().feedback_events, 1);
}

#[test]
fn random_registers_round_trip_through_the_wire() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut s = sim();
    let mut expected_bias = [0u32; 9];
    let mut expected_rf = vec![0u32; 256];
    for _ in 0..400 {
        if rng.gen_bool(0.3) {
            let (a, c) = (rng.gen_range(0..9u8), rng.gen_range(0..4096u32));
            s.queue_word(bias_word(a, c)).unwrap();
            expected_bias[a as usize] = c;
        } else {
            let (a, c) = (rng.gen::<u8>(), rng.gen_range(0..1024u32));
            s.queue_word(rf_word(a, c)).unwrap();
            expected_rf[a as usize] = c;
        }
    }
    assert!(s.run_until_quiescent(1e8));
    for (r, c) in expected_bias.iter().enumerate() {
        assert_eq!(s.memory().read_bias(r), *c);
    }
    for (r, c) in expected_rf.iter().enumerate() {
        assert_eq!(s.memory().read_rf(r), *c);
    }
    assert_eq!(s.summary().protocol_errors, 0);
}

#[test]
fn back_to_back_words_wait_for_feedback() {
    let mut s = sim();
    s.queue_word(bias_word(1, 1)).unwrap();
    s.queue_word(bias_word(2, 2)).unwrap();
    assert!(s.run_until_quiescent(1e5));
    let acks: Vec<f64> = s.trace().signal("data_in.feedback").map(|e| e.t_ns).collect();
    assert_eq!(acks.len(), 2);
    // Reception (22 clocks) plus write (12 clocks) after the first ack.
    assert!(acks[1] - acks[0] >= 34.0 * RF_PERIOD_NS - 1e-6, "{acks:?}");
}

#[test]
fn no_stimulus_gives_empty_trace() {
    let out = run_simulation(&Scenario::baseline(), &Stimulus::default(), 10_000.0).unwrap();
    assert!(out.trace.is_empty());
}

#[test]
fn sixteen_bias_clocks_refresh_each_electrode_once() {
    let mut s = sim();
    // Edges at cycles 0..=15.
    s.run_until(15.5 / 2.22e6 * 1e9);
    assert_eq!(s.hold_caps().refreshes(), &[1; 8]);
}

#[test]
fn refresh_keeps_droop_within_pooled_budget() {
    let mut text = String::new();
    for e in 0..8 {
        text.push_str(&format!("0 write-bias {e} 4095\n"));
    }
    let stim = Stimulus::parse(&text).unwrap();
    let out = run_simulation(&Scenario::baseline(), &stim, 1e6).unwrap();
    let worst = out.summary.worst_deviation_v();
    assert!(worst > 20e-6 && worst <= 24e-6, "{worst}");
    assert!(out.summary.refreshes.iter().all(|&n| n > 100));
}

#[test]
fn ramp_targets_register_eight_and_increases() {
    let stim = Stimulus::parse("0 write-bias 8 2\n0 write-bias 5 100\n20000 ramp-mode on\n").unwrap();
    let out = run_simulation(&Scenario::baseline(), &stim, 200_000.0).unwrap();
    let codes: Vec<f64> = out.trace.signal("bias.ramp_code").map(|e| e.value).collect();
    assert!(codes.len() > 100);
    assert!(codes.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(codes[0], 0.0);
    let e2: Vec<f64> = out.trace.signal("bias.e2").map(|e| e.value).collect();
    assert!(e2.windows(2).rev().take(50).all(|w| w[1] > w[0]));
    let last_e5 = out.trace.signal("bias.e5").last().unwrap();
    assert!(last_e5.t_ns < 20_000.0);
    assert!((last_e5.value - 100.0 / 4096.0).abs() < 1e-15);
}

fn staircase_sim() -> Simulator {
    let mut s = sim();
    for a in 0..32u8 {
        s.queue_word(rf_word(a, a as u32 * 10)).unwrap();
    }
    assert!(s.run_until_quiescent(1e6));
    s
}

#[test]
fn playback_reproduces_stored_sequence_at_sample_rate() {
    let mut s = staircase_sim();
    let start = s.now_ns();
    s.queue_command(RfCommandWord::new([0, 1], [1, 0]).unwrap());
    s.run_until(start + 200.0);
    let out1: Vec<_> = s.trace().signal("rf.out1").cloned().collect();
    let out2: Vec<_> = s.trace().signal("rf.out2").cloned().collect();
    assert_eq!(out1.len(), 32);
    for w in out1.windows(2) {
        assert!((w[1].t_ns - w[0].t_ns - 10.0 / 3.0).abs() < 1e-6);
    }
    let lsb = 4e-3 / 1024.0;
    for (i, e) in out1.iter().enumerate() {
        let addr = if i < 16 { i } else { 16 + (i - 16) };
        assert!((e.value - addr as f64 * 10.0 * lsb).abs() < 1e-15);
    }
    for (i, e) in out2.iter().enumerate() {
        let addr = if i < 16 { 16 + i } else { i - 16 };
        assert!((e.value - addr as f64 * 10.0 * lsb).abs() < 1e-15);
    }
    assert_eq!(s.trace().signal("rf.end_sequ").count(), 1);
}

#[test]
fn double_buffer_hands_over_without_gap() {
    let mut s = staircase_sim();
    let start = s.now_ns();
    s.queue_command(RfCommandWord::new([0, 0], [0, 0]).unwrap());
    s.queue_command(RfCommandWord::new([1, 1], [1, 1]).unwrap());
    s.run_until(start + 300.0);
    let out1: Vec<_> = s.trace().signal("rf.out1").cloned().collect();
    assert_eq!(out1.len(), 64);
    for w in out1.windows(2) {
        assert!((w[1].t_ns - w[0].t_ns - 10.0 / 3.0).abs() < 1e-6);
    }
    assert_eq!(out1[31].value, out1[15].value);
    assert!(out1[32].value > out1[31].value);
    assert_eq!(s.summary().sequences_played, 2);
    assert_eq!(s.summary().backpressure_events, 0);
}

#[test]
fn third_command_while_both_buffers_full_is_dropped() {
    let mut s = staircase_sim();
    for ids in [[0, 0], [1, 1], [0, 1]] {
        s.queue_command(RfCommandWord::new(ids, ids).unwrap());
    }
    let start = s.now_ns();
    s.run_until(start + 400.0);
    assert_eq!(s.summary().backpressure_events, 1);
    assert_eq!(s.summary().sequences_played, 2);
}

#[test]
fn simulation_is_deterministic() {
    let text = "0 write-bias 0 100\n0 write-rf 0 5\n10 play 0 0 0 0\n5000 ramp-mode on\n";
    let stim = Stimulus::parse(text).unwrap();
    let a = run_simulation(&Scenario::baseline(), &stim, 50_000.0).unwrap();
    let b = run_simulation(&Scenario::baseline(), &stim, 50_000.0).unwrap();
    assert_eq!(a.trace.to_csv(), b.trace.to_csv());
    assert_eq!(a.summary, b.summary);
}

#[test]
fn stimulus_is_checked_against_configuration() {
    let mut s = sim();
    let err = s
        .load_stimulus(&Stimulus::parse("0 write-bias 0 1\n5 write-bias 9 1\n").unwrap())
        .unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
    let err = s
        .load_stimulus(&Stimulus::parse("0 write-rf 0 1024\n").unwrap())
        .unwrap_err();
    assert!(err.to_string().contains("line 1"), "{err}");
}

proptest! {
    #[test]
    fn dataword_round_trip(rf in any::<bool>(), addr in any::<u8>(), payload in any::<u32>()) {
        let f = fmt();
        let kind = if rf { WordKind::Rf } else { WordKind::Bias };
        let w = DataWord {
            kind,
            address: (addr as u32 % f.registers(kind)) as u8,
            payload: payload & ((1 << f.width(kind)) - 1),
        };
        let bits = encode_dataword(&f, &w).unwrap();
        prop_assert_eq!(bits.len(), 10 + f.width(kind) as usize);
        prop_assert_eq!(decode_dataword(&f, &bits).unwrap(), w);
    }

    #[test]
    fn dual_port_reads_do_not_interfere(
        a in 0usize..256, b in 0usize..256, ca in 0u32..1024, cb in 0u32..1024,
    ) {
        prop_assume!(a != b);
        let mut m = MemoryBank::new(9, 12, 256, 10);
        m.write_serial(WordKind::Rf, a as u8, ca);
        m.write_serial(WordKind::Rf, b as u8, cb);
        prop_assert_eq!(m.read_rf_pair(a, b), (ca, cb));
        prop_assert_eq!(m.read_rf_pair(b, a), (cb, ca));
    }
}
