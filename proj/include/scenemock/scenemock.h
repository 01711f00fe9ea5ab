/* Copyright 2026 The scenemock Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the scenemock library. Every function returns an
 * sm_status; on failure sm_last_error_message() describes the error for the
 * calling thread. Strings returned through char** are owned by the caller
 * and released with sm_string_free. Handles are released with their *_free
 * function; passing NULL to any *_free is a no-op.
 */
#ifndef SCENEMOCK_SCENEMOCK_H_
#define SCENEMOCK_SCENEMOCK_H_

#include <stdint.h>

#if defined(SCENEMOCK_BUILDING_LIBRARY)
#define SM_API __attribute__((visibility("default")))
#else
#define SM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sm_status {
  SM_OK = 0,
  SM_INVALID_ARGUMENT = 1,
  SM_IO = 2,
  SM_FORMAT = 3,
  SM_NUMERIC = 4,
  SM_BEHIND_CAMERA = 5,
  SM_DEGENERATE_DATABASE = 6,
  SM_INSUFFICIENT_SAMPLES = 7,
  SM_COLLAPSED_COMPONENT = 8,
  SM_ZERO_SUPPORT = 9,
  SM_INTERNAL = 10
} sm_status;

typedef struct sm_camera sm_camera;
typedef struct sm_template sm_template;
typedef struct sm_maps sm_maps;
typedef struct sm_gmm sm_gmm;

SM_API const char* sm_version(void);
SM_API const char* sm_status_name(sm_status status);
SM_API const char* sm_last_error_message(void);
SM_API void sm_string_free(char* str);

/* Cameras */
SM_API sm_status sm_camera_default(sm_camera** out);
SM_API sm_status sm_camera_from_json(const char* json, sm_camera** out);
SM_API sm_status sm_camera_to_json(const sm_camera* camera, char** out_json);
SM_API void sm_camera_free(sm_camera* camera);

/* Templates. sm_template_generate builds a procedural chair database of
 * `count` models and fits the PCA template to it. */
SM_API sm_status sm_template_generate(int count, uint64_t seed, double variance_target,
                                      sm_template** out);
SM_API sm_status sm_template_from_json(const char* json, sm_template** out);
SM_API sm_status sm_template_to_json(const sm_template* model, char** out_json);
SM_API sm_status sm_template_info(const sm_template* model, int* keypoints, int* modes);
SM_API void sm_template_free(sm_template* model);

/* Keypoint maps (.kpm files). `mode_one` non-zero degrades one object per
 * scene only. `sigma` <= 0 selects the default lobe width. */
SM_API sm_status sm_maps_load(const char* path, sm_maps** out);
SM_API sm_status sm_maps_save(const sm_maps* maps, const char* path);
SM_API sm_status sm_maps_info(const sm_maps* maps, int* channels, int* width, int* height,
                              float* sigma);
/* Writes up to `capacity` per-channel peak counts at threshold tau_m. */
SM_API sm_status sm_maps_count_peaks(const sm_maps* maps, double tau_m, int* counts,
                                     int capacity);
SM_API sm_status sm_maps_render(const char* scenes_json, int index, const sm_template* model,
                                const sm_camera* camera, double sigma, double drop_min,
                                double drop_max, int mode_one, uint64_t seed, sm_maps** out);
SM_API void sm_maps_free(sm_maps* maps);

/* Scenes. `arrangement_json` may be NULL for defaults. */
SM_API sm_status sm_scenes_generate(const char* arrangement_json, int count,
                                    const sm_template* model, const sm_camera* camera,
                                    char** out_json);

/* Pairwise mixtures fit on the relative poses of a scenes document. */
SM_API sm_status sm_gmm_fit(const char* scenes_json, int components, double delta_r,
                            uint64_t seed, sm_gmm** out);
SM_API sm_status sm_gmm_from_json(const char* json, sm_gmm** out);
SM_API sm_status sm_gmm_to_json(const sm_gmm* gmm, char** out_json);
SM_API void sm_gmm_free(sm_gmm* gmm);
SM_API uint64_t sm_gmm_evaluation_count(void);
SM_API void sm_reset_gmm_evaluation_count(void);

/* Inference. `gmm` may be NULL only when options disable pairwise terms.
 * `options_json` may be NULL; keys: tau_m, tau_u, alpha, beta,
 * max_iterations, use_pairwise, max_deform_sigma. */
SM_API sm_status sm_infer(const sm_maps* maps, const sm_camera* camera,
                          const sm_template* model, const sm_gmm* gmm,
                          const char* options_json, char** out_scene_json);

/* Evaluation of a result scene against entry `gt_index` of a ground-truth
 * document (or the document itself if it is a single scene). `camera` is
 * used for 2D IoU; NULL selects the default camera. */
SM_API sm_status sm_evaluate(const char* result_json, const char* gt_json, int gt_index,
                             const sm_camera* camera, double tau_j, double tau_theta,
                             char** out_report_json);
SM_API sm_status sm_sweep(const char* result_json, const char* gt_json, int gt_index,
                          char** out_csv);

/* Experiments and tuning. `config_json` may be NULL for defaults. Any of the
 * output pointers may be NULL. */
SM_API sm_status sm_experiment(const char* config_json, char** out_report_json,
                               char** out_csv, char** out_sweep_csv);
SM_API sm_status sm_tune(const char* config_json, int budget, uint64_t seed, int held_out,
                         char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* SCENEMOCK_SCENEMOCK_H_ */
