//! Extended state observer tracking a constant acceleration disturbance,
//! next to its closed-form triple-pole response.

use gimbal::control::Eso;

fn main() {
    let (d, wo, dt) = (2.0f64, 100.0f64, 1e-4f64);
    let (mut x, mut v) = (0.0, 0.0);
    let mut eso = Eso::default();
    println!("{:>8} {:>10} {:>10}", "omega*t", "z3/d", "analytic");
    for n in 1..=1000 {
        x += v * dt + 0.5 * d * dt * dt;
        v += d * dt;
        eso.update(x, 0.0, 1.0, wo, dt);
        if n % 100 == 0 {
            let s = wo * n as f64 * dt;
            let exact = 1.0 - (-s).exp() * (1.0 + s + 0.5 * s * s);
            println!("{s:>8.1} {:>10.5} {exact:>10.5}", eso.z3 / d);
        }
    }
}
