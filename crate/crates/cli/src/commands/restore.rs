//! Deblurring and denoising of a grayscale image.

use nfb_core::engine::RunStatus;
use nfb_core::experiments::{run_restore, RestoreConfig};
use nfb_core::linalg::pgm::{write_pgm_annotated, PgmFormat};
use nfb_core::linalg::GrayImage;

use crate::config::{self, Meta, OutDir};
use crate::error::{CliError, CliResult};
use crate::Context;

pub const SECTION: &str = "restore";

fn save(out: &OutDir, name: &str, img: &GrayImage<f64>, meta: &Meta) -> CliResult<()> {
    let path = out.path(name);
    let mut buf = Vec::new();
    write_pgm_annotated(img, PgmFormat::Binary, &meta.header_lines(), &mut buf)?;
    std::fs::write(&path, buf).map_err(|e| CliError::io(&path, e))
}

pub fn run(ctx: &Context) -> CliResult<()> {
    let cfg: RestoreConfig = config::section(&ctx.table, SECTION, ctx.seed)?;
    let outcome = run_restore::<f64>(&cfg)?;
    let s = &outcome.summary;
    let init = &outcome.init;
    let provenance = vec![
        match &cfg.image {
            Some(p) => format!("image {}", p.display()),
            None => format!("synthetic {0}x{0} test image", cfg.size),
        },
        format!("noise N(0, {}^2) from ChaCha8 seed {}", cfg.noise_std, cfg.seed),
        format!(
            "tau = kappa1 chi = {}, sigma = {}, eps = {}, psi = {}",
            init.tau, init.sigma, init.epsilon, init.psi
        ),
        format!("certificate issued for alpha = lim alpha_n = {}, lambda = {}", init.alpha, init.lambda),
    ];
    let meta = Meta::new("image-restore", SECTION, cfg.seed, &cfg, provenance);

    let out = OutDir::create(&ctx.out)?;
    out.write_config(&meta, SECTION, &cfg)?;
    save(&out, "original.pgm", &outcome.instance.original, &meta)?;
    save(&out, "observed.pgm", &outcome.instance.observation, &meta)?;
    save(&out, "restored.pgm", &outcome.restored, &meta)?;
    out.write_csv("restore_trace.csv", &meta, &outcome.trace.to_csv())?;
    let doc = serde_json::json!({
        "meta": meta,
        "summary": s,
        "init": init,
        "psnr_gain_db": s.psnr_restored - s.psnr_observed,
    });
    out.write_json("restore.json", &doc)?;

    println!(
        "{}x{} {} {} schedule {}: {:?} after {} iterations ({:.2} s)",
        s.width, s.height, s.kernel.name(), s.method, s.schedule, s.status, s.iterations, s.elapsed_s
    );
    println!("PSNR observed {:.2} dB, restored {:.2} dB", s.psnr_observed, s.psnr_restored);
    if s.status == RunStatus::Diverged {
        return Err(CliError::Diverged(format!("{} after {} iterations", s.method, s.iterations)));
    }
    Ok(())
}
