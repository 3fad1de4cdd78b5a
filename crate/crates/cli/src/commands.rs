use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use tcoarse::{
    build_layers_capped, check_fs_strict, check_sign_condition, check_swap_condition, connect_chain, embed_cube,
    greedy_extract, random_so_function, so_radius, verify_chain, verify_embedding, CacheError, ChainCertificate,
    ChainStep, ChainVerdict, Element, EndsError, FsError, FsPrefix, LayerCache, SignVerdict, SoFunction,
    StrictVerdict, SumsetLayers, SwapVerdict, ViolationKind, Window,
};

use crate::config::Config;
use crate::failure::{Failure, EXHAUSTED, FAIL, PASS};
use crate::report::Report;
use crate::Command;

pub struct Context {
    pub cfg: Config,
    pub cache: Option<PathBuf>,
    pub seed: u64,
}

impl Context {
    fn layers(&self, window: Window) -> Result<SumsetLayers, Failure> {
        let cfg = &self.cfg;
        if let Some(dir) = &self.cache {
            match LayerCache::new(dir).load_or_build(&cfg.group, &cfg.sequence, window, cfg.cap) {
                Ok((layers, _hit)) => return Ok(layers),
                // an unusable cache directory only costs a rebuild
                Err(CacheError::Io(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        Ok(build_layers_capped(&cfg.group, &cfg.sequence, window, cfg.cap)?)
    }

    fn element(&self, s: &str) -> Result<Element, Failure> {
        self.cfg
            .group
            .parse_element(s)
            .map_err(|e| Failure::invalid(e.to_string()))
    }
}

fn strings(xs: &[Element]) -> Vec<String> {
    xs.iter().map(Element::to_string).collect()
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))
}

pub fn dispatch(ctx: &Context, command: &Command, rep: &mut Report) -> Result<u8, Failure> {
    let window = ctx.cfg.window;
    match command {
        Command::Ball { covering } => ball(ctx, covering.unwrap_or(window.depth), rep),
        Command::Dist { x, y } => dist(ctx, x, y, rep),
        Command::Decompose { x } => decompose(ctx, x, rep),
        Command::ExtractFs { length } => extract(ctx, *length, rep),
        Command::CheckFs => check_fs(ctx, rep),
        Command::VerifyEmbed { s, nmax } => verify_embed(ctx, *s, *nmax, rep),
        Command::EmbedCube { d } => cube(ctx, *d, rep),
        Command::SoCheck { file, m } => so_check(ctx, file, *m, rep),
        Command::Chain { y, z, m } => chain(ctx, y, z, *m, rep),
        Command::VerifyChain { file } => chain_verify(ctx, file, rep),
        Command::SoFixture { m } => fixture(ctx, *m, rep),
    }
}

fn ball(ctx: &Context, max_n: usize, rep: &mut Report) -> Result<u8, Failure> {
    let l = ctx.layers(ctx.cfg.window)?;
    let sizes = l.growth_profile();
    rep.emit("growth", json!({ "sizes": sizes }), || {
        let s: Vec<String> = sizes.iter().map(usize::to_string).collect();
        format!("growth {}", s.join(" "))
    });
    for n in 0..=max_n {
        let b = l.covering_number(n)?;
        rep.emit("covering", json!({ "n": n, "lower": b.lower, "upper": b.upper }), || {
            format!("covering n={n} lower={} upper={}", b.lower, b.upper)
        });
    }
    Ok(PASS)
}

fn dist(ctx: &Context, x: &str, y: &str, rep: &mut Report) -> Result<u8, Failure> {
    let (x, y) = (ctx.element(x)?, ctx.element(y)?);
    let l = ctx.layers(ctx.cfg.window)?;
    let d = l.dist(&x, &y);
    rep.emit("distance", json!({ "x": x.to_string(), "y": y.to_string(), "distance": d }), || {
        d.map_or_else(|| "UNKNOWN".to_string(), |d| d.to_string())
    });
    Ok(if d.is_some() { PASS } else { EXHAUSTED })
}

fn decompose(ctx: &Context, x: &str, rep: &mut Report) -> Result<u8, Failure> {
    let x = ctx.element(x)?;
    let l = ctx.layers(ctx.cfg.window)?;
    let word = match l.decompose(&x) {
        Ok(w) => w,
        Err(tcoarse::BallError::OutsideWindow(_)) => {
            rep.emit("word", json!({ "x": x.to_string(), "length": null, "letters": null }), || {
                "UNKNOWN".into()
            });
            return Ok(EXHAUSTED);
        }
        Err(e) => return Err(e.into()),
    };
    let letters = strings(&word);
    rep.emit("word", json!({ "x": x.to_string(), "length": word.len(), "letters": letters }), || {
        let mut out = format!("length {}\n", word.len());
        for a in &letters {
            out.push_str(&format!("letter\t{a}\n"));
        }
        out
    });
    Ok(PASS)
}

fn prefix_fields(p: &FsPrefix) -> Value {
    json!({ "terms": strings(p.terms()), "sources": p.sources() })
}

fn prefix_text(p: &FsPrefix) -> String {
    let mut out = format!("length {}\n", p.len());
    for (b, i) in p.terms().iter().zip(p.sources()) {
        out.push_str(&format!("term\t{i}\t{b}\n"));
    }
    out
}

fn extract(ctx: &Context, length: usize, rep: &mut Report) -> Result<u8, Failure> {
    let l = ctx.layers(ctx.cfg.window)?;
    match greedy_extract(&l, length, ctx.cfg.budget) {
        Ok(p) => {
            rep.emit("fs_prefix", prefix_fields(&p), || prefix_text(&p));
            Ok(PASS)
        }
        Err(FsError::BudgetExhausted { prefix, step, tried }) => {
            let mut fields = prefix_fields(&prefix);
            fields["step"] = step.into();
            fields["tried"] = tried.into();
            rep.emit("fs_prefix_partial", fields, || {
                format!("EXHAUSTED at b_{step} after {tried} candidates\n{}", prefix_text(&prefix))
            });
            Ok(EXHAUSTED)
        }
        Err(e) => Err(e.into()),
    }
}

fn check_fs(ctx: &Context, rep: &mut Report) -> Result<u8, Failure> {
    let p = ctx.cfg.prefix()?;
    let l = ctx.layers(ctx.cfg.window)?;
    let strict = check_fs_strict(&p);
    let strict_ok = strict.is_strict();
    let detail = match &strict {
        StrictVerdict::Strict => Value::Null,
        StrictVerdict::Violation(v) => v.to_string().into(),
    };
    rep.emit("fs_strict", json!({ "pass": strict_ok, "violation": detail }), || match &strict {
        StrictVerdict::Strict => "fs_strict PASS".into(),
        StrictVerdict::Violation(v) => format!("fs_strict FAIL {v}"),
    });

    let sign = check_sign_condition(&p, &l)?;
    let sign_ok = sign.is_pass();
    let detail = match &sign {
        SignVerdict::Pass => Value::Null,
        SignVerdict::Violation(v) => v.to_string().into(),
    };
    rep.emit("sign_condition", json!({ "pass": sign_ok, "violation": detail }), || match &sign {
        SignVerdict::Pass => "sign_condition PASS".into(),
        SignVerdict::Violation(v) => format!("sign_condition FAIL {v}"),
    });

    let mut swap_ok = strict_ok;
    if strict_ok {
        for n in 0..=l.depth() {
            let swap = check_swap_condition(&p, &l, n)?;
            swap_ok &= swap.is_pass();
            let detail = match &swap {
                SwapVerdict::Pass => Value::Null,
                SwapVerdict::Violation(v) => v.to_string().into(),
            };
            rep.emit("swap_condition", json!({ "depth": n, "pass": swap.is_pass(), "violation": detail }), || {
                match &swap {
                    SwapVerdict::Pass => format!("swap_condition depth={n} PASS"),
                    SwapVerdict::Violation(v) => format!("swap_condition depth={n} FAIL {v}"),
                }
            });
        }
    } else {
        rep.emit("swap_condition", json!({ "skipped": "prefix is not FS-strict" }), || {
            "swap_condition SKIPPED (prefix is not FS-strict)".into()
        });
    }
    Ok(if strict_ok && sign_ok && swap_ok { PASS } else { FAIL })
}

fn verify_embed(ctx: &Context, s: usize, nmax: usize, rep: &mut Report) -> Result<u8, Failure> {
    let p = ctx.cfg.prefix()?;
    let l = ctx.layers(ctx.cfg.with_depth(nmax))?;
    let r = verify_embedding(&p, &l, s, nmax)?;
    let violation = r.violation.as_ref().map(|v| {
        json!({
            "kind": match v.kind { ViolationKind::Backward => "backward", ViolationKind::Forward => "forward" },
            "F": v.from.iter().collect::<Vec<_>>(),
            "H": v.to.iter().collect::<Vec<_>>(),
            "difference": v.difference.to_string(),
            "word_length": v.word_length,
            "hamming": v.hamming,
        })
    });
    let fields = json!({
        "support": s,
        "depth": nmax,
        "pairs_checked": r.pairs_checked,
        "pass": r.passed(),
        "violation": violation,
    });
    rep.emit("embedding", fields, || match &r.violation {
        None => format!("PASS support={s} depth={nmax} pairs={}", r.pairs_checked),
        Some(v) => format!("FAIL {v}"),
    });
    Ok(if r.passed() { PASS } else { FAIL })
}

fn cube(ctx: &Context, d: usize, rep: &mut Report) -> Result<u8, Failure> {
    let p = ctx.cfg.prefix()?;
    let l = ctx.layers(ctx.cfg.window)?;
    let c = embed_cube(&p, &l, d)?;
    let pass = c.distinct && c.exact_within_depth();
    let fields = json!({
        "dimension": c.dimension,
        "depth": c.depth,
        "distinct": c.distinct,
        "forward_holds": c.forward_holds(),
        "exact_within_depth": c.exact_within_depth(),
        "lower_bound": c.lower_bound,
        "images": strings(&c.images),
        "distances": c.distances,
    });
    rep.emit("cube", fields, || format!("{}{}", c.to_text(), verdict(pass)));
    Ok(if pass { PASS } else { FAIL })
}

fn so_check(ctx: &Context, file: &Path, m: usize, rep: &mut Report) -> Result<u8, Failure> {
    let f = SoFunction::from_text(&ctx.cfg.group, &read(file)?)?;
    let l = ctx.layers(ctx.cfg.window)?;
    let r = so_radius(&f, &l)?;
    let pass = r.radius.is_some_and(|r| r <= m);
    let fields = json!({
        "m": m,
        "radius": r.radius,
        "tested_balls": r.tested_balls,
        "skipped_balls": r.skipped_balls,
        "pass": pass,
    });
    rep.emit("so_radius", fields, || {
        let radius = r.radius.map_or_else(|| "NOT_SO".to_string(), |r| r.to_string());
        format!(
            "{} radius={radius} m={m} tested={} skipped={}",
            verdict(pass),
            r.tested_balls,
            r.skipped_balls
        )
    });
    Ok(if pass { PASS } else { FAIL })
}

fn step_fields(steps: &[ChainStep]) -> Value {
    steps
        .iter()
        .map(|s| json!({ "u": s.u.to_string(), "v": s.v.to_string(), "center": s.center.to_string() }))
        .collect()
}

fn chain(ctx: &Context, y: &str, z: &str, m: usize, rep: &mut Report) -> Result<u8, Failure> {
    let (y, z) = (ctx.element(y)?, ctx.element(z)?);
    let l = ctx.layers(ctx.cfg.window)?;
    match connect_chain(&l, &y, &z, m, ctx.cfg.budget) {
        Ok(cert) => {
            let fields = json!({
                "y": cert.y.to_string(),
                "z": cert.z.to_string(),
                "radius": cert.radius,
                "steps": step_fields(&cert.steps),
            });
            rep.emit("chain", fields, || cert.to_text());
            Ok(PASS)
        }
        Err(EndsError::BudgetExhausted { step, from_y, from_z }) => {
            let fields = json!({
                "step": step,
                "from_y": step_fields(&from_y),
                "from_z": step_fields(&from_z),
            });
            rep.emit("chain_partial", fields, || {
                format!(
                    "EXHAUSTED at replacement {step}: {} steps from y, {} from z",
                    from_y.len(),
                    from_z.len()
                )
            });
            Ok(EXHAUSTED)
        }
        Err(e) => Err(e.into()),
    }
}

fn chain_verify(ctx: &Context, file: &Path, rep: &mut Report) -> Result<u8, Failure> {
    let cert = ChainCertificate::from_text(&ctx.cfg.group, &read(file)?)?;
    let l = ctx.layers(ctx.cfg.window)?;
    let v = verify_chain(&cert, &l);
    let (fields, human) = match &v {
        ChainVerdict::Pass => (
            json!({ "pass": true, "steps": cert.steps.len() }),
            format!("PASS steps={}", cert.steps.len()),
        ),
        ChainVerdict::Fail { step, reason } => (
            json!({ "pass": false, "step": step, "reason": reason }),
            match step {
                Some(k) => format!("FAIL step {k}: {reason}"),
                None => format!("FAIL {reason}"),
            },
        ),
    };
    rep.emit("chain_verdict", fields, || human);
    Ok(if v.is_pass() { PASS } else { FAIL })
}

fn fixture(ctx: &Context, m: usize, rep: &mut Report) -> Result<u8, Failure> {
    let l = ctx.layers(ctx.cfg.window)?;
    let f = random_so_function(&l, m, ctx.seed)?;
    let text = f.to_text();
    let points: Vec<Value> = text
        .lines()
        .filter_map(|line| line.rsplit_once('\t'))
        .map(|(x, v)| json!([x, v == "1"]))
        .collect();
    rep.emit("so_fixture", json!({ "m": m, "seed": ctx.seed, "points": points }), || text);
    Ok(PASS)
}
