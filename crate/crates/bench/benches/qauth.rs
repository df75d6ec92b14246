use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qauth_core::channel::default_omega;
use qauth_core::clifford_code::keyed_average_channel;
use qauth_core::verification::eta::eta_bruteforce_multi;
use qauth_core::verification::{input_battery, security_gap_trap, TrapAttack, TrapMode};
use qauth_core::{AttackUnitary, CliffordCodeParams, CliffordElement, EcCode, KeyStrategy, PauliOperator, TrapCode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn clifford_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("clifford/sample_uniform");
    for n in [1usize, 3, 6] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            b.iter(|| CliffordElement::sample_uniform(n, &mut rng).unwrap());
        });
    }
    group.finish();

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let key = CliffordElement::sample_uniform(6, &mut rng).unwrap();
    let p: PauliOperator = "XYZIZX".parse().unwrap();
    c.bench_function("clifford/conjugate_n6", |b| b.iter(|| key.conjugate(&p).unwrap()));
    c.bench_function("clifford/to_unitary_n3", |b| {
        let key = CliffordElement::sample_uniform(3, &mut rng).unwrap();
        b.iter(|| key.to_unitary().unwrap())
    });
}

fn clifford_key_average(c: &mut Criterion) {
    let params = CliffordCodeParams::new(1, 2).unwrap();
    let attack = AttackUnitary::haar_seeded(3, 1, 5).unwrap();
    let omega = default_omega(1).unwrap();
    let mut group = c.benchmark_group("clifford_code/keyed_average_channel");
    group.sample_size(10);
    group.bench_function("n1_d2_1000_keys", |b| {
        b.iter(|| {
            let strategy = KeyStrategy::Sampled { count: 1000, seed: 9 };
            keyed_average_channel(&params, &attack, strategy, &omega).unwrap()
        })
    });
    group.finish();
}

fn eta_counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("eta/bruteforce");
    let cases = [(1usize, "XZI"), (2, "XXZZII"), (3, "XXZZYIIII")];
    for (n, lit) in cases {
        let p: PauliOperator = lit.parse().unwrap();
        if n == 3 {
            group.sample_size(10);
        }
        group.bench_with_input(BenchmarkId::from_parameter(lit), &p, |b, p| {
            b.iter(|| eta_bruteforce_multi(n, &[0, 1], p).unwrap())
        });
    }
    group.finish();
}

fn trap_symbolic(c: &mut Criterion) {
    let code = TrapCode::new(EcCode::five_qubit());
    let omega = default_omega(1).unwrap();
    let inputs = input_battery(1, 1, 2, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let attack = TrapAttack::Pauli {
        pauli: "ZZZIIIIIIIIIIII".parse().unwrap(),
        r_qubits: 1,
    };
    let mut group = c.benchmark_group("trap_code/symbolic_gap");
    group.sample_size(10);
    group.bench_function("five_qubit_1000_permutations", |b| {
        b.iter(|| {
            let mode = TrapMode::Symbolic {
                samples: Some(1000),
                seed: 4,
            };
            security_gap_trap(&code, &attack, &inputs, mode, &omega).unwrap()
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    clifford_sampling,
    clifford_key_average,
    eta_counting,
    trap_symbolic
);
criterion_main!(benches);
