//! Deterministic CSV formatting: shortest round-trip floats, `inf` for
//! infinite dB values.

pub const METRICS_HEADER: &str = "method,noise_pct,seed,me,mae,mse,rmse,nmse,psnr_db,snr_db,j_e,d_max,d_min,j_o,db,xb,classes_final,evaluations,wall_ms";

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone)]
pub struct MetricsRow {
    pub method: String,
    pub noise_pct: f64,
    pub seed: u64,
    pub me: f64,
    pub mae: f64,
    pub mse: f64,
    pub rmse: f64,
    pub nmse: f64,
    pub psnr_db: f64,
    pub snr_db: f64,
    pub j_e: f64,
    pub d_max: f64,
    pub d_min: f64,
    pub j_o: f64,
    pub db: f64,
    pub xb: f64,
    pub classes_final: usize,
    pub evaluations: u64,
    pub wall_ms: u64,
}

impl MetricsRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.method,
            fmt_f64(self.noise_pct),
            self.seed,
            fmt_f64(self.me),
            fmt_f64(self.mae),
            fmt_f64(self.mse),
            fmt_f64(self.rmse),
            fmt_f64(self.nmse),
            fmt_f64(self.psnr_db),
            fmt_f64(self.snr_db),
            fmt_f64(self.j_e),
            fmt_f64(self.d_max),
            fmt_f64(self.d_min),
            fmt_f64(self.j_o),
            fmt_f64(self.db),
            fmt_f64(self.xb),
            self.classes_final,
            self.evaluations,
            self.wall_ms
        )
    }

    pub fn parse(line: &str) -> Option<MetricsRow> {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 19 {
            return None;
        }
        fn num(s: &str) -> f64 {
            match s {
                "inf" => f64::INFINITY,
                "-inf" => f64::NEG_INFINITY,
                "nan" => f64::NAN,
                _ => s.parse().unwrap_or(f64::NAN),
            }
        }
        Some(MetricsRow {
            method: f[0].to_string(),
            noise_pct: num(f[1]),
            seed: f[2].parse().ok()?,
            me: num(f[3]),
            mae: num(f[4]),
            mse: num(f[5]),
            rmse: num(f[6]),
            nmse: num(f[7]),
            psnr_db: num(f[8]),
            snr_db: num(f[9]),
            j_e: num(f[10]),
            d_max: num(f[11]),
            d_min: num(f[12]),
            j_o: num(f[13]),
            db: num(f[14]),
            xb: num(f[15]),
            classes_final: f[16].parse().ok()?,
            evaluations: f[17].parse().ok()?,
            wall_ms: f[18].parse().ok()?,
        })
    }
}
