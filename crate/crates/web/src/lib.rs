//! Browser bindings for three small interactive views.

use std::f64::consts::PI;

use modkit::affine::inner_function;
use modkit::linalg::{c, RVec};
use modkit::standard;
use modkit::wedge::{PoincareElement, Wedge};
use wasm_bindgen::prelude::*;

/// Spectrum of Delta for the 2x2 C-example: [polar min, polar max, formula min, formula max].
pub fn c_spectrum(cval: f64) -> modkit::Result<Vec<f64>> {
    let polar = standard::c_example(cval)?.modular_objects()?.spectrum();
    let cm = modkit::linalg::RMat::from_row_slice(2, 2, &[0.0, cval, -cval, 0.0]);
    let half = standard::half_delta_from_c(&standard::RealStructure::canonical(2), &cm)?;
    let formula = modkit::realified::positive_spectrum(&half.compose(&half));
    Ok(polar.into_iter().chain(formula).collect())
}

/// |B(x + iy)| on an nx x ny grid over [-extent, extent] x [0, pi], rows from y = 0 upwards.
pub fn inner_heatmap(b: f64, extent: f64, nx: usize, ny: usize) -> Vec<f64> {
    let (nx, ny) = (nx.max(2), ny.max(2));
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = PI * j as f64 / (ny - 1) as f64;
        for i in 0..nx {
            let x = -extent + 2.0 * extent * i as f64 / (nx - 1) as f64;
            out.push(inner_function(b, c(x, y)).norm());
        }
    }
    out
}

/// 1+1 dimensional raster of the boosted, translated right wedge: 1 inside W, 2 inside W', 0 elsewhere.
/// Rows run from x0 = extent down to -extent, columns from x1 = -extent to extent.
pub fn wedge_raster(rapidity: f64, t0: f64, t1: f64, n: usize, extent: f64) -> Vec<u8> {
    let n = n.max(2);
    let g = PoincareElement::translation(RVec::from_vec(vec![t0, t1])).compose(&PoincareElement::boost(2, rapidity));
    let w = Wedge::right(2).transformed(&g);
    let wc = w.complement();
    let coord = |k: usize| -extent + 2.0 * extent * k as f64 / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    for r in 0..n {
        for col in 0..n {
            let x = RVec::from_vec(vec![-coord(r), coord(col)]);
            out.push(if w.contains(&x) { 1 } else if wc.contains(&x) { 2 } else { 0 });
        }
    }
    out
}

#[wasm_bindgen(js_name = cSpectrum)]
pub fn c_spectrum_js(cval: f64) -> Result<Vec<f64>, JsError> {
    c_spectrum(cval).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = innerHeatmap)]
pub fn inner_heatmap_js(b: f64, extent: f64, nx: usize, ny: usize) -> Vec<f64> {
    inner_heatmap(b, extent, nx, ny)
}

#[wasm_bindgen(js_name = wedgeRaster)]
pub fn wedge_raster_js(rapidity: f64, t0: f64, t1: f64, n: usize, extent: f64) -> Vec<u8> {
    wedge_raster(rapidity, t0, t1, n, extent)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_of_c_example() {
        let s = c_spectrum(0.5).unwrap();
        assert_eq!(s.len(), 4);
        assert!((s[0] - 1.0 / 9.0).abs() < 1e-10 && (s[1] - 9.0).abs() < 1e-10);
        assert!((s[0] - s[2]).abs() < 1e-10 && (s[1] - s[3]).abs() < 1e-10);
        assert!(c_spectrum(1.2).is_err());
    }

    #[test]
    fn heatmap_sign_of_b() {
        assert!(inner_heatmap(1.0, 3.0, 16, 8).iter().all(|&m| m <= 1.0 + 1e-12));
        assert!(inner_heatmap(-1.0, 3.0, 16, 8).iter().any(|&m| m > 1.0));
    }

    #[test]
    fn raster_of_standard_wedge() {
        let r = wedge_raster(0.0, 0.0, 0.0, 5, 1.0);
        // middle row is x0 = 0: left of origin in W', right of it in W
        assert_eq!(&r[10..15], &[2, 2, 0, 1, 1]);
    }
}
