// `!(x > 0.0)` is how tolerances reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use eigsurf::families::{parse_spec, verify, SeededRng};
use eigsurf::io::{
    collisions_json, components_json, eigenvalues_json, parse_hull, parse_matrix, parse_path,
    stream_scan_csv, write_bundle_csv, write_scan_csv, DEFAULT_SAMPLE_CAP,
};
use eigsurf::linalg::{char_poly, eigenvalues, relative_residual, BarycentricPoint};
use eigsurf::pairgraph::{adjacency_json, build_pairing_graph, export_dot, principal_graph};
use eigsurf::surface::{
    component_separation, exceptional_clusters, grid, k_components, local_transitivity_probe, scan,
};
use eigsurf::track::{monodromy, track, MatrixPath, TrackerConfig};
use eigsurf::{Error, Result, ToleranceConfig};

#[derive(Parser)]
#[command(name = "eigsurf", version, about = "Eigen-surfaces of convex hulls of matrices")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Eigenvalue residual tolerance (relative).
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_eig: f64,
    /// Relative threshold for treating eigenvalues as equal.
    #[arg(long, global = true, default_value_t = 1e-7)]
    cluster_tol: f64,
    /// Relative threshold for a vanishing discriminant.
    #[arg(long, global = true, default_value_t = 1e-8)]
    disc_tol: f64,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Initial tracking steps per path segment.
    #[arg(long, global = true, default_value_t = 64)]
    steps: usize,
}

impl GlobalOpts {
    fn tol(&self) -> Result<ToleranceConfig> {
        for (name, v) in [
            ("--tol-eig", self.tol_eig),
            ("--cluster-tol", self.cluster_tol),
            ("--disc-tol", self.disc_tol),
        ] {
            if !(v > 0.0) {
                return Err(Error::argument(format!("{name} must be positive")));
            }
        }
        Ok(ToleranceConfig {
            tol_eig: self.tol_eig,
            cluster_tol: self.cluster_tol,
            disc_zero_tol: self.disc_tol,
        })
    }

    fn tracker(&self) -> Result<TrackerConfig> {
        let cfg = TrackerConfig {
            initial_steps: self.steps,
            ..TrackerConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the eigenvalues of a matrix as [[re, im], ...], sorted.
    Eigs { matrix: PathBuf },
    /// Track eigenpaths along a path; writes a CSV and a collisions sidecar.
    Track {
        path: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monodromy of a closed path.
    Loop {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a hull's eigen-surface on the barycentric lattice.
    Scan {
        hull: PathBuf,
        #[arg(long)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
        /// Stream the CSV and skip components above this many samples.
        #[arg(long, default_value_t = DEFAULT_SAMPLE_CAP)]
        sample_cap: usize,
        /// Radius of local transitivity probes around exceptional clusters.
        #[arg(long)]
        probe_radius: Option<f64>,
    },
    /// Pairing graph of the hull generators, or the principal graph.
    Graph {
        hull: PathBuf,
        #[arg(long)]
        principal: bool,
        /// Lattice resolution used to find exceptional representatives.
        #[arg(long, default_value_t = 20)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a family against its closed-form spectrum.
    Verify {
        family: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fraction of random closed polygonal loops in a hull that are weakly transitive.
    ProbeRandomLoops {
        hull: PathBuf,
        #[arg(long, default_value_t = 100)]
        loops: usize,
        #[arg(long, default_value_t = 4)]
        waypoints: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let f = fs::File::create(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    Ok(BufWriter::new(f))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Pretty JSON to `out` when given, otherwise to stdout.
fn emit(out: Option<&Path>, value: &impl Serialize) -> Result<()> {
    match out {
        Some(p) => write_json(p, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

fn sidecar(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "bundle".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.collisions.json"))
}

fn cmd_eigs(opts: &GlobalOpts, path: &Path) -> Result<()> {
    let tol = opts.tol()?;
    let a = parse_matrix(&read(path)?)?;
    let mut values = eigenvalues(&a)?;
    let p = char_poly(&a);
    let worst = values
        .iter()
        .map(|&z| relative_residual(&p, z, a.frobenius_norm()))
        .fold(0.0, f64::max);
    if worst > tol.tol_eig {
        eprintln!("warning: eigenvalue residual {worst:.3e} exceeds --tol-eig {:.1e}", tol.tol_eig);
    }
    values.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    println!("{}", eigenvalues_json(&values));
    Ok(())
}

fn cmd_track(opts: &GlobalOpts, path: &Path, out: &Path) -> Result<()> {
    let cfg = opts.tracker()?;
    let p = parse_path(&read(path)?)?;
    let bundle = track(&p, &cfg)?;
    let mut w = create(out)?;
    write_bundle_csv(&mut w, &bundle)?;
    w.flush()?;
    let side = sidecar(out);
    write_json(&side, &collisions_json(&bundle.collisions, &cfg))?;
    eprintln!(
        "{} samples, {} collision events; wrote {} and {}",
        bundle.parameters.len(),
        bundle.collisions.len(),
        out.display(),
        side.display()
    );
    Ok(())
}

fn cmd_loop(opts: &GlobalOpts, path: &Path, out: Option<&Path>) -> Result<()> {
    let cfg = opts.tracker()?;
    let p = parse_path(&read(path)?)?;
    let r = monodromy(&p, &cfg)?;
    let value = json!({
        "mapping": r.permutation.mapping,
        "cycles": r.permutation.cycles(),
        "value_preserving": r.permutation.value_preserving,
        "weakly_transitive": r.weakly_transitive,
        "transitive": r.transitive,
        "collisions": collisions_json(r.collisions(), &cfg)["collisions"],
    });
    emit(out, &value)
}

fn cmd_scan(
    opts: &GlobalOpts,
    hull_path: &Path,
    resolution: usize,
    out: &Path,
    sample_cap: usize,
    probe_radius: Option<f64>,
) -> Result<()> {
    let tol = opts.tol()?;
    let cfg = opts.tracker()?;
    let hull = parse_hull(&read(hull_path)?)?;
    if resolution == 0 {
        return Err(Error::argument("--resolution must be at least 1"));
    }
    fs::create_dir_all(out)?;
    let count = grid::lattice_size(hull.k(), resolution).unwrap_or(usize::MAX);
    if count > sample_cap {
        let mut w = create(&out.join("scan.csv"))?;
        let summary = stream_scan_csv(&mut w, &hull, resolution, &tol)?;
        w.flush()?;
        let value = json!({
            "samples": summary.samples,
            "streamed": true,
            "minimal_list": summary.minimal_list,
            "regular": summary.regular,
            "exceptional": summary.exceptional,
            "inconsistent": summary.inconsistent,
            "note": "sample count exceeds --sample-cap; components were not computed",
        });
        write_json(&out.join("summary.json"), &value)?;
        return emit(None, &value);
    }

    let s = scan(&hull, resolution, &tol)?;
    let mut w = create(&out.join("scan.csv"))?;
    write_scan_csv(&mut w, &s)?;
    w.flush()?;
    let comps = k_components(&s, &cfg)?;
    let sep = component_separation(&comps, &s);
    write_json(&out.join("components.json"), &components_json(&comps, &sep))?;

    let clusters = exceptional_clusters(&s);
    let mut cluster_values = Vec::new();
    for c in &clusters {
        let probe = match probe_radius {
            Some(r) => Some(local_transitivity_probe(&s, c.representative, r, &cfg)?),
            None => None,
        };
        cluster_values.push(json!({
            "members": c.members,
            "representative": c.representative,
            "alpha": s.samples[c.representative].alpha.weights(),
            "probe": probe,
        }));
    }
    write_json(&out.join("clusters.json"), &json!({ "clusters": cluster_values }))?;

    let summary = json!({
        "samples": s.samples.len(),
        "streamed": false,
        "minimal_list": s.minimal_list.to_string(),
        "regular": s.regular,
        "exceptional": s.exceptional_count(),
        "inconsistent": s.inconsistent().count(),
        "components": comps.iter().map(|c| c.k).collect::<Vec<_>>(),
        "separation": sep,
        "clusters": clusters.len(),
    });
    write_json(&out.join("summary.json"), &summary)?;
    emit(None, &summary)
}

fn cmd_graph(opts: &GlobalOpts, hull_path: &Path, principal: bool, resolution: usize, out: &Path) -> Result<()> {
    let tol = opts.tol()?;
    let cfg = opts.tracker()?;
    let hull = parse_hull(&read(hull_path)?)?;
    let g = if principal {
        if resolution == 0 {
            return Err(Error::argument("--resolution must be at least 1"));
        }
        principal_graph(&scan(&hull, resolution, &tol)?, &cfg)?
    } else {
        let names = hull.labels().map(<[String]>::to_vec);
        build_pairing_graph(hull.generators(), names, tol.cluster_tol, &cfg)?
    };
    let mut w = create(out)?;
    w.write_all(export_dot(&g).as_bytes())?;
    w.flush()?;
    write_json(&out.with_extension("json"), &adjacency_json(&g))?;
    eprintln!(
        "{} vertices, {} edges, {} components",
        g.vertices.len(),
        g.edges.len(),
        g.component_count()
    );
    Ok(())
}

fn cmd_verify(opts: &GlobalOpts, path: &Path, out: Option<&Path>) -> Result<()> {
    let spec = parse_spec(&read(path)?)?;
    let r = verify(&spec, &opts.tol()?, &opts.tracker()?)?;
    emit(out, &r)
}

fn cmd_probe_random_loops(
    opts: &GlobalOpts,
    hull_path: &Path,
    loops: usize,
    waypoints: usize,
    out: Option<&Path>,
) -> Result<()> {
    let cfg = opts.tracker()?;
    let hull = parse_hull(&read(hull_path)?)?;
    if loops == 0 || waypoints < 2 {
        return Err(Error::argument("need at least 1 loop of at least 2 waypoints"));
    }
    let mut rng = SeededRng::new(opts.seed);
    let paths: Vec<MatrixPath> = (0..loops)
        .map(|_| {
            let mut w: Vec<BarycentricPoint> = (0..waypoints)
                .map(|_| BarycentricPoint::new(rng.probability_vector(hull.k())))
                .collect::<Result<_>>()?;
            w.push(w[0].clone());
            MatrixPath::hull_polygonal(hull.clone(), w, true)
        })
        .collect::<Result<_>>()?;
    use rayon::prelude::*;
    let verdicts: Vec<bool> = paths
        .par_iter()
        .map(|p| monodromy(p, &cfg).map(|r| r.weakly_transitive))
        .collect::<Result<_>>()?;
    let weak = verdicts.iter().filter(|&&v| v).count();
    let value = json!({
        "loops": loops,
        "waypoints": waypoints,
        "seed": opts.seed,
        "weakly_transitive": weak,
        "fraction": weak as f64 / loops as f64,
    });
    emit(out, &value)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(t) = cli.opts.threads {
        if t == 0 {
            return Err(Error::argument("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::argument(e.to_string()))?;
    }
    let o = &cli.opts;
    match &cli.command {
        Command::Eigs { matrix } => cmd_eigs(o, matrix),
        Command::Track { path, out } => cmd_track(o, path, out),
        Command::Loop { path, out } => cmd_loop(o, path, out.as_deref()),
        Command::Scan {
            hull,
            resolution,
            out,
            sample_cap,
            probe_radius,
        } => cmd_scan(o, hull, *resolution, out, *sample_cap, *probe_radius),
        Command::Graph {
            hull,
            principal,
            resolution,
            out,
        } => cmd_graph(o, hull, *principal, *resolution, out),
        Command::Verify { family, out } => cmd_verify(o, family, out.as_deref()),
        Command::ProbeRandomLoops {
            hull,
            loops,
            waypoints,
            out,
        } => cmd_probe_random_loops(o, hull, *loops, *waypoints, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
