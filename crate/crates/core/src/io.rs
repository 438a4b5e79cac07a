//! CSV snapshots of DG fields and solver checkpoints.
//!
//! A field snapshot is one row per coefficient:
//!
//! ```text
//! cell,x_left,mode,coefficient
//! 0,0,0,0.9836316430834658
//! ```
//!
//! A checkpoint is a `# key=value,...` header followed by one snapshot block
//! per field, each introduced by a `# field=<name>` line. Floats are written
//! in shortest round-trip form, so import reproduces the state bit for bit.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::fields::{DGField, KineticField, Mesh1D};
use crate::limit::LimitState;
use crate::operators::FluxChoice;
use crate::scheme::{SchemeConfig, State};
use crate::velocity::{VelocityModel, VelocitySpace};

pub const SNAPSHOT_COLUMNS: &str = "cell,x_left,mode,coefficient";

pub fn write_field_snapshot<W: Write>(field: &DGField, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{SNAPSHOT_COLUMNS}")?;
    let mesh = field.mesh();
    for i in 0..mesh.cells() {
        let x_left = mesh.x_left(i);
        for (j, c) in field.cell(i).iter().enumerate() {
            writeln!(w, "{i},{x_left},{j},{c}")?;
        }
    }
    Ok(())
}

/// Point samples `x,value` at `per_cell` evenly spaced interior points per cell.
pub fn write_sampled<W: Write>(field: &DGField, per_cell: usize, mut w: W) -> std::io::Result<()> {
    writeln!(w, "x,value")?;
    let mesh = field.mesh();
    let per_cell = per_cell.max(1);
    for i in 0..mesh.cells() {
        for s in 0..per_cell {
            let xi = -1.0 + (2 * s + 1) as f64 / per_cell as f64;
            writeln!(w, "{},{}", mesh.map(i, xi), field.eval_ref(i, xi))?;
        }
    }
    Ok(())
}

/// Parses a snapshot block (with its column header) onto a known mesh.
pub fn read_field_snapshot(text: &str, mesh: Mesh1D, degree: usize) -> Result<DGField> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    match lines.next() {
        Some(SNAPSHOT_COLUMNS) => {}
        other => {
            return Err(Error::Snapshot(format!(
                "expected column header `{SNAPSHOT_COLUMNS}`, found {other:?}"
            )))
        }
    }
    let m = degree + 1;
    let mut field = DGField::zeros(mesh, degree);
    let mut seen = vec![false; mesh.cells() * m];
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(Error::Snapshot(format!("bad row `{line}`")));
        }
        let cell: usize = parse(cols[0], line)?;
        let mode: usize = parse(cols[2], line)?;
        let value: f64 = parse(cols[3], line)?;
        if cell >= mesh.cells() || mode >= m {
            return Err(Error::Snapshot(format!("row `{line}` outside the field layout")));
        }
        field.cell_mut(cell)[mode] = value;
        seen[cell * m + mode] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Snapshot(format!(
            "missing coefficient for cell {} mode {}",
            missing / m,
            missing % m
        )));
    }
    Ok(field)
}

fn parse<T: std::str::FromStr>(s: &str, line: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Snapshot(format!("cannot parse `{s}` in row `{line}`")))
}

/// Header fields shared by kinetic and limit checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointHeader {
    pub step: usize,
    pub time: f64,
    pub eps: f64,
    pub dt: f64,
    pub degree: usize,
    pub cells: usize,
    pub flux: FluxChoice,
    pub model: VelocityModel,
    pub nv: usize,
    pub include_bh: bool,
    pub x_min: f64,
    pub x_max: f64,
    pub prev_g_norm: Option<f64>,
}

impl CheckpointHeader {
    fn to_line(&self) -> String {
        let prev = self
            .prev_g_norm
            .map_or_else(|| "none".to_string(), |v| v.to_string());
        format!(
            "# n={},t={},eps={},k={},N={},flux={},model={},nv={},include_bh={},dt={},x_min={},x_max={},prev_g_norm={}",
            self.step,
            self.time,
            self.eps,
            self.degree,
            self.cells,
            self.flux,
            self.model,
            self.nv,
            self.include_bh,
            self.dt,
            self.x_min,
            self.x_max,
            prev
        )
    }

    fn from_line(line: &str) -> Result<Self> {
        let body = line
            .strip_prefix('#')
            .ok_or_else(|| Error::Snapshot("checkpoint header must start with `#`".into()))?;
        let map: BTreeMap<&str, &str> = body
            .trim()
            .split(',')
            .filter_map(|kv| kv.split_once('='))
            .map(|(k, v)| (k.trim(), v.trim()))
            .collect();
        let get = |key: &str| {
            map.get(key)
                .copied()
                .ok_or_else(|| Error::Snapshot(format!("checkpoint header lacks `{key}`")))
        };
        let num = |key: &str| -> Result<f64> { parse(get(key)?, line) };
        let int = |key: &str| -> Result<usize> { parse(get(key)?, line) };
        let prev_g_norm = match get("prev_g_norm")? {
            "none" => None,
            v => Some(parse(v, line)?),
        };
        Ok(Self {
            step: int("n")?,
            time: num("t")?,
            eps: num("eps")?,
            dt: num("dt")?,
            degree: int("k")?,
            cells: int("N")?,
            flux: get("flux")?.parse()?,
            model: get("model")?.parse()?,
            nv: int("nv")?,
            include_bh: parse(get("include_bh")?, line)?,
            x_min: num("x_min")?,
            x_max: num("x_max")?,
            prev_g_norm,
        })
    }

    pub fn mesh(&self) -> Result<Mesh1D> {
        Mesh1D::new(self.x_min, self.x_max, self.cells)
    }

    /// Scheme configuration recorded in the header.
    pub fn config(&self) -> Result<SchemeConfig> {
        let space = VelocitySpace::new(self.model, self.nv)?;
        Ok(SchemeConfig::new(self.mesh()?, self.degree, space, self.eps, self.dt)
            .with_flux(self.flux)
            .with_bh(self.include_bh))
    }
}

pub fn write_checkpoint<W: Write>(state: &State, config: &SchemeConfig, mut w: W) -> Result<()> {
    let header = CheckpointHeader {
        step: state.step,
        time: state.time,
        eps: config.eps,
        dt: config.dt,
        degree: config.degree,
        cells: config.mesh.cells(),
        flux: config.flux,
        model: config.space.model(),
        nv: config.space.len(),
        include_bh: config.include_bh,
        x_min: config.mesh.x_min(),
        x_max: config.mesh.x_max(),
        prev_g_norm: state.prev_g_norm,
    };
    writeln!(w, "{}", header.to_line())?;
    writeln!(w, "# field=rho")?;
    write_field_snapshot(&state.rho, &mut w)?;
    for (q, g) in state.g.nodes().iter().enumerate() {
        writeln!(w, "# field=g{q}")?;
        write_field_snapshot(g, &mut w)?;
    }
    Ok(())
}

/// Same layout as the kinetic checkpoint with `eps = 0` and fields `rho`, `q`.
pub fn write_limit_checkpoint<W: Write>(
    state: &LimitState,
    dt: f64,
    flux: FluxChoice,
    space: &VelocitySpace,
    mut w: W,
) -> Result<()> {
    let mesh = *state.rho.mesh();
    let header = CheckpointHeader {
        step: state.step,
        time: state.time,
        eps: 0.0,
        dt,
        degree: state.rho.degree(),
        cells: mesh.cells(),
        flux,
        model: space.model(),
        nv: space.len(),
        include_bh: true,
        x_min: mesh.x_min(),
        x_max: mesh.x_max(),
        prev_g_norm: None,
    };
    writeln!(w, "{}", header.to_line())?;
    writeln!(w, "# field=rho")?;
    write_field_snapshot(&state.rho, &mut w)?;
    writeln!(w, "# field=q")?;
    write_field_snapshot(&state.q, &mut w)?;
    Ok(())
}

fn split_blocks(text: &str) -> Result<(CheckpointHeader, Vec<(String, String)>)> {
    let mut lines = text.lines();
    let header = CheckpointHeader::from_line(
        lines
            .next()
            .ok_or_else(|| Error::Snapshot("empty checkpoint".into()))?,
    )?;
    let mut blocks: Vec<(String, String)> = Vec::new();
    for line in lines {
        if let Some(name) = line.trim().strip_prefix("# field=") {
            blocks.push((name.to_string(), String::new()));
        } else if let Some((_, body)) = blocks.last_mut() {
            body.push_str(line);
            body.push('\n');
        } else if !line.trim().is_empty() {
            return Err(Error::Snapshot(format!("data before first field block: `{line}`")));
        }
    }
    Ok((header, blocks))
}

pub fn read_checkpoint(text: &str) -> Result<(State, SchemeConfig)> {
    let (header, blocks) = split_blocks(text)?;
    let config = header.config()?;
    let mut rho = None;
    let mut g: Vec<Option<DGField>> = vec![None; config.space.len()];
    for (name, body) in &blocks {
        let field = read_field_snapshot(body, config.mesh, config.degree)?;
        if name == "rho" {
            rho = Some(field);
        } else if let Some(idx) = name.strip_prefix('g').and_then(|s| s.parse::<usize>().ok()) {
            let slot = g
                .get_mut(idx)
                .ok_or_else(|| Error::Snapshot(format!("velocity node {idx} out of range")))?;
            *slot = Some(field);
        } else {
            return Err(Error::Snapshot(format!("unknown field block `{name}`")));
        }
    }
    let rho = rho.ok_or_else(|| Error::Snapshot("checkpoint lacks rho".into()))?;
    let g = g
        .into_iter()
        .enumerate()
        .map(|(i, f)| f.ok_or_else(|| Error::Snapshot(format!("checkpoint lacks g{i}"))))
        .collect::<Result<Vec<_>>>()?;
    let state = State {
        rho,
        g: KineticField::from_nodes(g),
        step: header.step,
        time: header.time,
        prev_g_norm: header.prev_g_norm,
    };
    Ok((state, config))
}

pub fn read_limit_checkpoint(text: &str) -> Result<(LimitState, CheckpointHeader)> {
    let (header, blocks) = split_blocks(text)?;
    let mesh = header.mesh()?;
    let mut rho = None;
    let mut q = None;
    for (name, body) in &blocks {
        let field = read_field_snapshot(body, mesh, header.degree)?;
        match name.as_str() {
            "rho" => rho = Some(field),
            "q" => q = Some(field),
            other => return Err(Error::Snapshot(format!("unknown field block `{other}`"))),
        }
    }
    let state = LimitState {
        rho: rho.ok_or_else(|| Error::Snapshot("checkpoint lacks rho".into()))?,
        q: q.ok_or_else(|| Error::Snapshot("checkpoint lacks q".into()))?,
        step: header.step,
        time: header.time,
    };
    Ok((state, header))
}
