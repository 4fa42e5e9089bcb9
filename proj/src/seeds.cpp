#include "rankstab/seeds.hpp"

#include <openssl/evp.h>

#include <string>

namespace rankstab {

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view dataset_id,
                          std::size_t p_index, std::size_t replicate, std::string_view tag) {
  std::string preimage = "rankstab-seed-v1|";
  preimage += std::to_string(master_seed);
  preimage += '|';
  preimage += dataset_id;
  preimage += '|';
  preimage += std::to_string(p_index);
  preimage += '|';
  preimage += std::to_string(replicate);
  preimage += '|';
  preimage += tag;

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  EVP_Digest(preimage.data(), preimage.size(), digest, &digest_len, EVP_sha256(), nullptr);

  std::uint64_t seed = 0;
  for (int i = 0; i < 8; ++i) {
    seed = (seed << 8) | digest[i];
  }
  return seed;
}

}  // namespace rankstab
