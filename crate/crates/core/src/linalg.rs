//! Dense linear algebra over 𝔽_ℓ, just enough for per-bidegree quotients,
//! restriction matrices and lifts.

use crate::coeff::Prime;

/// Brings `rows` into reduced row echelon form in place, dropping zero rows.
/// Returns the pivot column of each remaining row.
pub fn rref(p: Prime, rows: &mut Vec<Vec<u32>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(found) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let inv = p.inv(rows[r][col]).expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            *x = p.mul(*x, inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let factor = rows[i][col];
                for c in col..ncols {
                    let sub = p.mul(factor, rows[r][c]);
                    rows[i][c] = p.sub(rows[i][c], sub);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Result of analysing a linear map `V -> W` given by the images of a basis of `V`.
#[derive(Debug, Clone)]
pub struct LinearMapAnalysis {
    /// For each basis vector `e_k` of `W`, a preimage in `V`, if one exists.
    pub preimages: Vec<Option<Vec<u32>>>,
    /// A basis of the kernel, as coordinate vectors in `V`.
    pub kernel: Vec<Vec<u32>>,
}

/// `images[i]` is the image of the `i`-th basis vector of `V`, written in a
/// basis of `W` of size `dim_w`.
pub fn analyse_map(p: Prime, images: &[Vec<u32>], dim_w: usize) -> LinearMapAnalysis {
    let dim_v = images.len();
    // Augmented rows [image | identity]: rows whose image part vanishes after
    // elimination record kernel combinations.
    let width = dim_w + dim_v;
    let mut rows: Vec<Vec<u32>> = images
        .iter()
        .enumerate()
        .map(|(i, img)| {
            let mut row = vec![0; width];
            row[..dim_w].copy_from_slice(img);
            row[dim_w + i] = 1;
            row
        })
        .collect();
    let pivots = rref(p, &mut rows, width);

    let kernel = rows
        .iter()
        .zip(&pivots)
        .filter(|(_, &pc)| pc >= dim_w)
        .map(|(row, _)| row[dim_w..].to_vec())
        .collect();
    let preimages = (0..dim_w).map(|k| solve(p, images, dim_w, k)).collect();
    LinearMapAnalysis { preimages, kernel }
}

fn solve(p: Prime, images: &[Vec<u32>], dim_w: usize, target: usize) -> Option<Vec<u32>> {
    let dim_v = images.len();
    // Columns: unknowns x_0..x_{dim_v-1}, then rhs.
    let mut rows: Vec<Vec<u32>> = (0..dim_w)
        .map(|w| {
            let mut row: Vec<u32> = images.iter().map(|img| img[w]).collect();
            row.push(u32::from(w == target));
            row
        })
        .collect();
    let pivots = rref(p, &mut rows, dim_v + 1);
    if pivots.contains(&dim_v) {
        return None;
    }
    let mut x = vec![0; dim_v];
    for (row, &pc) in rows.iter().zip(&pivots) {
        x[pc] = row[dim_v];
    }
    Some(x)
}
