use super::{Experiment, HarnessError};
use std::collections::BTreeMap;

/// A documented parameter with its default.
#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub key: &'static str,
    pub default: &'static str,
    pub help: &'static str,
    /// Boolean switch on the command line.
    pub flag: bool,
}

const fn p(key: &'static str, default: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec {
        key,
        default,
        help,
        flag: false,
    }
}

const CLASSICAL: &[ParamSpec] = &[
    p("system", "harmonic", "free | harmonic | quartic"),
    p("mass", "1", "particle mass"),
    p("omega", "1", "harmonic frequency"),
    p("lambda", "1", "quartic coupling, V = lambda q^4"),
    p("q0", "0.3", "initial position of the action table and trajectory"),
    p("p0", "1", "initial momentum of the demo trajectory"),
    p("dt", "0.001", "leapfrog step of the demo trajectory"),
    p("t-end", "10", "length of the demo trajectory"),
    p("hj-grid", "32x32", "action table nodes NQxNT"),
    p("q-range", "-1:1", "table positions lo:hi"),
    p("t-range", "0.6:2", "table times lo:hi"),
    p("refine", "true", "also build the 2x refined table and check the convergence ratio"),
    p("out", "hj_residual.csv", "residual CSV"),
];

const LANGEVIN: &[ParamSpec] = &[
    p("drift", "linear", "zero | linear | cubic | constant"),
    p("gamma", "1", "drift coefficient (gamma, k or constant value)"),
    p("diffusion", "0.5", "diffusion constant D"),
    p("x0", "0", "initial position"),
    p("n-traj", "10000", "number of trajectories"),
    p("dt", "0.001", "Euler-Maruyama step"),
    p("t-end", "5.01", "simulated time"),
    p("km-bins", "20", "number of Kramers-Moyal bins"),
    p("km-window", "1", "increments per trajectory taken from the end of the run"),
    p("out", "km_coefficients.csv", "coefficient CSV"),
];

const FOKKER_PLANCK: &[ParamSpec] = &[
    p("drift", "linear", "zero | linear | cubic | constant"),
    p("gamma", "1", "drift coefficient (gamma, k or constant value)"),
    p("diffusion", "0.5", "diffusion constant D"),
    p("grid", "-4:4:200", "lo:hi:cells"),
    p("bc", "zeroflux", "zeroflux | absorbing"),
    p("x0", "0", "initial point mass"),
    p("dt", "0.001", "backward-Euler step"),
    p("steps", "2000", "number of steps"),
    ParamSpec {
        key: "stationary",
        default: "false",
        help: "solve for the stationary density instead of evolving",
        flag: true,
    },
    p("out", "density.csv", "density CSV"),
];

const PATH_MC: &[ParamSpec] = &[
    p("potential", "harmonic", "harmonic | quartic"),
    p("m", "1", "mass"),
    p("omega", "1", "harmonic frequency"),
    p("lambda", "1", "quartic coupling"),
    p("hbar", "1", "Planck constant"),
    p("n-slices", "64", "time slices"),
    p("spacing", "0.25", "lattice spacing"),
    p("sweeps", "21000", "sweeps per chain, thermalization included"),
    p("therm", "1000", "thermalization sweeps"),
    p("stride", "1", "sweeps between measurements"),
    p("chains", "4", "independent chains"),
    p("max-lag", "16", "largest correlator lag"),
    p("out", "correlator.csv", "correlator CSV"),
];

const OS_CHECK: &[ParamSpec] = &[
    p("mass", "1", "field mass"),
    p("lattice", "64", "time sites T, or TxL with a periodic space axis"),
    p("spacing", "1", "lattice spacing"),
    p("n-test-functions", "50", "number of random test-function sets"),
    p("max-size", "8", "largest set size"),
    p("support", "8", "largest time of random supports"),
    p("draws", "20000", "Monte-Carlo draws for the characteristic functional"),
    p("mc-functions", "20", "functions in the Monte-Carlo check"),
    p("tolerance", "1e-10", "eigenvalue tolerance"),
    p("wick-spacing", "0.1", "lattice spacing of the continuation check"),
    p("out", "os_report.csv", "positivity CSV"),
];

const PIPELINE: &[ParamSpec] = &[
    p("energy", "1", "energy scale E of the action process"),
    p("hbar", "0.1", "action noise scale; 0 gives the noiseless limit"),
    p("n-traj", "20000", "action-process realisations"),
    p("t-end", "5", "action-process horizon"),
    p("sweeps", "50000", "path-MC sweeps per chain"),
    p("inject-fault", "none", "stage forced to fail: none | classical | stochastic | fokker-planck | path-mc | os-check"),
];

pub fn param_specs(experiment: Experiment) -> &'static [ParamSpec] {
    match experiment {
        Experiment::Classical => CLASSICAL,
        Experiment::Langevin => LANGEVIN,
        Experiment::FokkerPlanck => FOKKER_PLANCK,
        Experiment::PathMc => PATH_MC,
        Experiment::OsCheck => OS_CHECK,
        Experiment::Pipeline => PIPELINE,
    }
}

/// Fully resolved key-value parameters of one experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Params {
    experiment: Experiment,
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

impl Params {
    /// Defaults overlaid with `overrides`; unknown keys are rejected.
    pub fn resolve<'a, I>(experiment: Experiment, overrides: I) -> Result<Self, HarnessError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let specs = param_specs(experiment);
        let mut values: BTreeMap<String, String> = specs
            .iter()
            .map(|s| (s.key.to_string(), s.default.to_string()))
            .collect();
        for (k, v) in overrides {
            let key = normalize(k);
            if !values.contains_key(&key) {
                return Err(HarnessError::UnknownKey {
                    key: k.to_string(),
                    experiment: experiment.name().to_string(),
                });
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { experiment, values })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &String)> {
        self.values.iter()
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values
            .get(key)
            .unwrap_or_else(|| panic!("{key} is not a parameter of {}", self.experiment.name()))
    }

    fn bad(&self, key: &str, what: &str) -> HarnessError {
        HarnessError::Usage(format!("{key} = {:?}: expected {what}", self.raw(key)))
    }

    pub fn f64(&self, key: &str) -> Result<f64, HarnessError> {
        self.raw(key)
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.bad(key, "a finite number"))
    }

    pub fn usize(&self, key: &str) -> Result<usize, HarnessError> {
        self.raw(key).parse().map_err(|_| self.bad(key, "a non-negative integer"))
    }

    pub fn bool(&self, key: &str) -> Result<bool, HarnessError> {
        match self.raw(key) {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            _ => Err(self.bad(key, "true or false")),
        }
    }

    pub fn choice(&self, key: &str, options: &[&str]) -> Result<String, HarnessError> {
        let v = self.raw(key);
        if options.contains(&v) {
            Ok(v.to_string())
        } else {
            Err(self.bad(key, &options.join(" | ")))
        }
    }

    /// `lo:hi`
    pub fn range(&self, key: &str) -> Result<(f64, f64), HarnessError> {
        let parts: Vec<f64> = self
            .raw(key)
            .split(':')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| self.bad(key, "lo:hi"))?;
        match parts[..] {
            [lo, hi] if lo < hi => Ok((lo, hi)),
            _ => Err(self.bad(key, "lo:hi with lo < hi")),
        }
    }

    /// `lo:hi:n`
    pub fn grid(&self, key: &str) -> Result<(f64, f64, usize), HarnessError> {
        let raw = self.raw(key);
        let parts: Vec<&str> = raw.split(':').collect();
        if parts.len() != 3 {
            return Err(self.bad(key, "lo:hi:cells"));
        }
        let lo = parts[0].trim().parse::<f64>().map_err(|_| self.bad(key, "lo:hi:cells"))?;
        let hi = parts[1].trim().parse::<f64>().map_err(|_| self.bad(key, "lo:hi:cells"))?;
        let n = parts[2].trim().parse::<usize>().map_err(|_| self.bad(key, "lo:hi:cells"))?;
        Ok((lo, hi, n))
    }

    /// `A` or `AxB`; the second factor defaults to `1`.
    pub fn dims(&self, key: &str) -> Result<(usize, usize), HarnessError> {
        let raw = self.raw(key);
        let mut it = raw.split(['x', 'X']);
        let a = it.next().and_then(|s| s.trim().parse().ok());
        let b = match it.next() {
            Some(s) => s.trim().parse().ok(),
            None => Some(1),
        };
        match (a, b, it.next()) {
            (Some(a), Some(b), None) => Ok((a, b)),
            _ => Err(self.bad(key, "N or NxM")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_is_named() {
        match Params::resolve(Experiment::Langevin, [("foo", "1")]) {
            Err(HarnessError::UnknownKey { key, .. }) => assert_eq!(key, "foo"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn underscores_alias_hyphens() {
        let p = Params::resolve(Experiment::Langevin, [("n_traj", "7")]).unwrap();
        assert_eq!(p.usize("n-traj").unwrap(), 7);
    }

    #[test]
    fn typed_getters() {
        let p = Params::resolve(
            Experiment::OsCheck,
            [("lattice", "16x4"), ("mass", "abc")],
        )
        .unwrap();
        assert_eq!(p.dims("lattice").unwrap(), (16, 4));
        assert!(p.f64("mass").is_err());
        let p = Params::resolve(Experiment::FokkerPlanck, []).unwrap();
        assert_eq!(p.grid("grid").unwrap(), (-4.0, 4.0, 200));
        assert!(!p.bool("stationary").unwrap());
    }
}
